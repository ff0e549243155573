#include "num/interval.hpp"

#include <mutex>

namespace jc {

RealInterval operator*(const RealInterval& a, const RealInterval& b) {
  Dyadic p1 = a.lo() * b.lo(), p2 = a.lo() * b.hi();
  Dyadic p3 = a.hi() * b.lo(), p4 = a.hi() * b.hi();
  return RealInterval(min(min(p1, p2), min(p3, p4)), max(max(p1, p2), max(p3, p4)));
}

RealInterval RealInterval::sqr() const {
  if (lo_.sign() >= 0) return RealInterval(lo_ * lo_, hi_ * hi_);
  if (hi_.sign() <= 0) return RealInterval(hi_ * hi_, lo_ * lo_);
  return RealInterval(Dyadic(), max(lo_ * lo_, hi_ * hi_));
}

RealInterval RealInterval::abs() const {
  if (lo_.sign() >= 0) return *this;
  if (hi_.sign() <= 0) return -*this;
  return RealInterval(Dyadic(), max(-lo_, hi_));
}

Dyadic div_dir(const Dyadic& a, const Dyadic& b, int64_t bits, Round mode) {
  if (b.is_zero()) throw Error(Err::internal, "dyadic division by zero");
  if (a.is_zero()) return Dyadic();
  // scale numerator so the quotient keeps ~bits significant bits
  mpz_class na = a.mantissa(), nb = b.mantissa();
  int64_t la = static_cast<int64_t>(a.bit_length());
  int64_t lb = static_cast<int64_t>(b.bit_length());
  int64_t shift = bits + lb - la + 2;
  if (shift < 0) shift = 0;
  na <<= static_cast<mp_bitcnt_t>(shift);
  mpz_class q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), na.get_mpz_t(), nb.get_mpz_t());
  // floor quotient: q <= true < q+1 at scale 2^(ea - shift - eb)
  int64_t e = a.exponent() - shift - b.exponent();
  bool exact = r == 0;
  switch (mode) {
    case Round::down:
      break;
    case Round::up:
      if (!exact) q += 1;
      break;
    case Round::nearest:
      // not needed on certified paths; round half-up via doubling
      if (!exact) {
        // compare remainder against |b|/2 by doubling
        mpz_class twice = r << 1;
        if (::cmp(twice, ::abs(nb)) >= 0) q += 1;
      }
      break;
  }
  return Dyadic(q, e);
}

RealInterval idiv(const RealInterval& a, const RealInterval& b, int64_t bits) {
  if (b.contains_zero()) throw Error(Err::internal, "interval division by zero");
  // endpoints candidates with directed rounding
  Dyadic c1 = div_dir(a.lo(), b.lo(), bits, Round::down);
  Dyadic c2 = div_dir(a.lo(), b.hi(), bits, Round::down);
  Dyadic c3 = div_dir(a.hi(), b.lo(), bits, Round::down);
  Dyadic c4 = div_dir(a.hi(), b.hi(), bits, Round::down);
  Dyadic u1 = div_dir(a.lo(), b.lo(), bits, Round::up);
  Dyadic u2 = div_dir(a.lo(), b.hi(), bits, Round::up);
  Dyadic u3 = div_dir(a.hi(), b.lo(), bits, Round::up);
  Dyadic u4 = div_dir(a.hi(), b.hi(), bits, Round::up);
  return RealInterval(min(min(c1, c2), min(c3, c4)), max(max(u1, u2), max(u3, u4)));
}

RealInterval isqrt(const RealInterval& x, int64_t bits) {
  if (x.lo().sign() < 0) throw Error(Err::internal, "isqrt of negative interval");
  return RealInterval(sqrt_lower(x.lo(), bits), sqrt_upper(x.hi(), bits));
}

namespace {

// 2*atanh(t) enclosure for a positive interval t, t.hi <= 1/2
RealInterval atanh2(const RealInterval& t, int64_t bits) {
  RealInterval t2 = t.sqr().rounded(bits);
  RealInterval sum = t;
  RealInterval pw = t;
  // terms t^(2j+1)/(2j+1) decay at least as 4^-j; run until below 2^-(bits+4)
  Dyadic tol = Dyadic::scaled(1, -(bits + 4));
  for (long j = 1; j < 4 * bits; ++j) {
    pw = (pw * t2).rounded(bits);
    RealInterval term = pw * RealInterval(div_dir(Dyadic(1), Dyadic(2 * j + 1), bits, Round::down),
                                          div_dir(Dyadic(1), Dyadic(2 * j + 1), bits, Round::up));
    sum = (sum + term).rounded(bits);
    if (pw.hi() < tol) {
      // geometric tail: sum_{i>j} t^(2i+1) <= t^(2j+3)/(1-t^2) <= pw.hi*t2h/(1-t2h)
      Dyadic t2h = t2.hi();
      Dyadic tail = div_dir(pw.hi() * t2h, Dyadic(1) - t2h, bits, Round::up);
      sum = RealInterval(sum.lo(), sum.hi() + tail);
      return sum.mul_pow2(1);
    }
  }
  throw Error(Err::internal, "atanh series did not reach tolerance");
}

std::mutex cache_mu;

}  // namespace

const RealInterval& ln2_bracket(int64_t bits) {
  static RealInterval cached;
  static int64_t cached_bits = -1;
  std::lock_guard<std::mutex> g(cache_mu);
  if (cached_bits < bits) {
    // ln 2 = 2*atanh(1/3)
    RealInterval third(div_dir(Dyadic(1), Dyadic(3), bits + 8, Round::down),
                       div_dir(Dyadic(1), Dyadic(3), bits + 8, Round::up));
    cached = atanh2(third, bits + 8);
    cached_bits = bits;
  }
  return cached;
}

const RealInterval& inv_sqrt2_bracket(int64_t bits) {
  static RealInterval cached;
  static int64_t cached_bits = -1;
  std::lock_guard<std::mutex> g(cache_mu);
  if (cached_bits < bits) {
    Dyadic half = Dyadic::scaled(1, -1);
    cached = RealInterval(sqrt_lower(half, bits + 4), sqrt_upper(half, bits + 4));
    cached_bits = bits;
  }
  return cached;
}

static RealInterval ilog_point(const Dyadic& x, int64_t bits, Round dir) {
  // x = m' * 2^q with m' in [1,2): log x = q ln2 + 2 atanh((m'-1)/(m'+1))
  int64_t len = static_cast<int64_t>(x.bit_length());
  int64_t q = x.exponent() + len - 1;
  Dyadic mprime = x.mul_pow2(-q);  // in [1, 2)
  RealInterval t(div_dir(mprime - Dyadic(1), mprime + Dyadic(1), bits + 8, Round::down),
                 div_dir(mprime - Dyadic(1), mprime + Dyadic(1), bits + 8, Round::up));
  RealInterval lg = t.lo().is_zero() && t.hi().is_zero() ? RealInterval()
                                                         : atanh2(t, bits + 8);
  RealInterval full = lg + ln2_bracket(bits).mul_pow2(0) * RealInterval(Dyadic(q));
  return dir == Round::down ? RealInterval(full.lo()) : RealInterval(full.hi());
}

RealInterval ilog(const RealInterval& x, int64_t bits) {
  if (x.lo().sign() <= 0) throw Error(Err::internal, "ilog needs a positive interval");
  RealInterval lo = ilog_point(x.lo(), bits, Round::down);
  RealInterval hi = ilog_point(x.hi(), bits, Round::up);
  return RealInterval(lo.lo(), hi.hi());
}

// directed e^u - 1 for 0 <= u <= 1/4 by Taylor series; every rounding is on
// the same side, and the dropped tail (positive, below one extra term once
// the terms decay past the target ulp) is added back on the upper side
static Dyadic expm1_series(const Dyadic& u, int64_t wb, Round mode) {
  if (u.sign() == 0) return Dyadic();
  Dyadic sum = u, term = u;
  for (long k = 2; k < 400; ++k) {
    term = div_dir(term * u, Dyadic(k), wb + 8, mode);
    sum = (sum + term).round_bits(wb + 8, mode).first;
    if (term.is_zero() || term.mul_pow2(wb + 4) < sum) {
      if (mode == Round::up) sum = (sum + term).round_bits(wb + 8, Round::up).first;
      return sum;
    }
  }
  throw Error(Err::internal, "expm1 series did not reach tolerance");
}

static Dyadic expm1_dir(const Dyadic& t, int64_t bits, Round mode) {
  // e^t - 1 for t >= 0: halve into [0, 1/4], run the directed series there,
  // square back through e^t - 1 = y(y+2) with y = e^{t/2} - 1
  if (t.sign() == 0) return Dyadic();
  const Dyadic quarter = Dyadic::scaled(1, -2);
  int64_t s = 0;
  Dyadic u = t;
  while (u > quarter) {
    u = u.mul_pow2(-1);
    ++s;
  }
  Dyadic y = expm1_series(u, bits + 2 * s + 8, mode);
  for (int64_t i = 0; i < s; ++i)
    y = (y * (y + Dyadic(2))).round_bits(bits + 2 * (s - i) + 8, mode).first;
  return y.round_bits(bits + 8, mode).first;
}

RealInterval iexp(const RealInterval& x, int64_t bits) {
  auto point = [&](const Dyadic& v, Round mode) -> Dyadic {
    if (v.sign() >= 0)
      return (Dyadic(1) + expm1_dir(v, bits, mode)).round_bits(bits + 4, mode).first;
    Round inner = mode == Round::up ? Round::down : Round::up;
    Dyadic denom = Dyadic(1) + expm1_dir(-v, bits + 8, inner);
    return div_dir(Dyadic(1), denom, bits + 4, mode);
  };
  return RealInterval(point(x.lo(), Round::down), point(x.hi(), Round::up));
}

RealInterval iexpm1(const RealInterval& x, int64_t bits) {
  if (x.lo().sign() < 0) throw Error(Err::internal, "iexpm1 needs x >= 0");
  return RealInterval(expm1_dir(x.lo(), bits, Round::down),
                      expm1_dir(x.hi(), bits, Round::up));
}

}  // namespace jc
