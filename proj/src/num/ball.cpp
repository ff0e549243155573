#include "num/ball.hpp"

namespace jc {

namespace {

// radius larger than 2^64 means the certification has diverged
const Dyadic kRadCap = Dyadic::scaled(1, 64);

// exponent of the tight power-of-two envelope: |d| < 2^top_exp(d)
int64_t top_exp(const Dyadic& d) { return d.exponent() + static_cast<int64_t>(d.bit_length()); }

// Directed upper bound on a + b for nonnegative terms. When the two scales
// are astronomically far apart (as happens when an orbit collapses toward a
// superattracting point while the radius stays at the oracle scale), an
// exact add would align the mantissas across the whole exponent gap; the
// small term is absorbed into one ulp of the large one instead.
Dyadic add_upper(const Dyadic& a, const Dyadic& b, int64_t bits) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  int64_t ta = top_exp(a), tb = top_exp(b);
  int64_t diff = ta >= tb ? ta - tb : tb - ta;
  if (diff <= 2 * bits + 32) return a + b;
  const Dyadic& big = ta >= tb ? a : b;
  int64_t tbig = ta >= tb ? ta : tb;
  return big.round_bits(bits, Round::up).first + Dyadic::scaled(1, tbig - bits);
}

// single outward rounding: center to nearest at working_bits, rounding error
// and exact radius folded together, radius rounded up; center components far
// below the radius scale are snapped to zero (their displacement goes into
// the radius) so later exact sums keep bounded alignment
Ball seal(const Dyadic& re, const Dyadic& im, const Dyadic& rad, const Precision& prec) {
  const int64_t wb = prec.working_bits;
  auto [r2, er] = re.round_bits(wb, Round::nearest);
  auto [i2, ei] = im.round_bits(wb, Round::nearest);
  Dyadic rr = add_upper(add_upper(rad, er, wb), ei, wb);
  if (!rr.is_zero()) {
    int64_t tr = top_exp(rr);
    if (!r2.is_zero() && top_exp(r2) < tr - wb - 8) {
      rr = add_upper(rr, r2.abs(), wb);
      r2 = Dyadic();
    }
    if (!i2.is_zero() && top_exp(i2) < tr - wb - 8) {
      rr = add_upper(rr, i2.abs(), wb);
      i2 = Dyadic();
    }
  }
  rr = rr.round_bits(wb, Round::up).first;
  if (rr > kRadCap) return Ball::whole_plane();
  return Ball(r2, i2, rr);
}

}  // namespace

RealInterval Ball::center_abs(int64_t bits) const {
  Dyadic n2 = re_ * re_ + im_ * im_;
  return RealInterval(sqrt_lower(n2, bits), sqrt_upper(n2, bits));
}

RealInterval Ball::abs_bracket(int64_t bits) const {
  if (whole_) throw Error(Err::internal, "abs_bracket on whole-plane ball");
  RealInterval c = center_abs(bits);
  Dyadic lo = c.lo() - rad_;
  if (lo.sign() < 0) lo = Dyadic();
  return RealInterval(lo, add_upper(c.hi(), rad_, bits));
}

Ball ball_add(const Ball& a, const Ball& b, const Precision& prec) {
  if (a.whole_ || b.whole_) return Ball::whole_plane();
  return seal(a.re_ + b.re_, a.im_ + b.im_, add_upper(a.rad_, b.rad_, prec.working_bits), prec);
}

Ball ball_mul(const Ball& a, const Ball& b, const Precision& prec) {
  if (a.whole_ || b.whole_) return Ball::whole_plane();
  const int64_t wb = prec.working_bits;
  // centers multiply exactly; |uv - ab| <= ra(|b| + rb) + |a| rb
  Dyadic re = a.re_ * b.re_ - a.im_ * b.im_;
  Dyadic im = a.re_ * b.im_ + a.im_ * b.re_;
  Dyadic na = a.center_abs(wb).hi();
  Dyadic nb = b.center_abs(wb).hi();
  Dyadic rad = add_upper(a.rad_ * add_upper(nb, b.rad_, wb), na * b.rad_, wb);
  return seal(re, im, rad, prec);
}

Ball ball_sqr(const Ball& a, const Precision& prec) {
  if (a.whole_) return Ball::whole_plane();
  const int64_t wb = prec.working_bits;
  // |u^2 - a^2| <= 2|a| r + r^2
  Dyadic re = a.re_ * a.re_ - a.im_ * a.im_;
  Dyadic im = (a.re_ * a.im_).mul_pow2(1);
  Dyadic na = a.center_abs(wb).hi();
  Dyadic rad = add_upper(na.mul_pow2(1) * a.rad_, a.rad_ * a.rad_, wb);
  return seal(re, im, rad, prec);
}

Ball ball_step(const Ball& z, const Ball& c, const Precision& prec) {
  if (z.whole_ || c.whole_) return Ball::whole_plane();
  const int64_t wb = prec.working_bits;
  Dyadic re = z.re_ * z.re_ - z.im_ * z.im_ + c.re_;
  Dyadic im = (z.re_ * z.im_).mul_pow2(1) + c.im_;
  Dyadic nz = z.center_abs(wb).hi();
  Dyadic rad = add_upper(add_upper(nz.mul_pow2(1) * z.rad_, z.rad_ * z.rad_, wb), c.rad_, wb);
  return seal(re, im, rad, prec);
}

Ball ball_widen(const Ball& a, const Dyadic& extra_rad) {
  if (a.whole_) return a;
  return Ball(a.re_, a.im_, a.rad_ + extra_rad);
}

}  // namespace jc
