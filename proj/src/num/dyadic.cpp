#include "num/dyadic.hpp"

#include <cmath>

namespace jc {

void Dyadic::canon() {
  if (man_ == 0) {
    exp_ = 0;
    return;
  }
  // strip trailing zero bits so the mantissa is odd
  mp_bitcnt_t tz = mpz_scan1(man_.get_mpz_t(), 0);
  if (tz > 0) {
    man_ >>= tz;
    exp_ += static_cast<int64_t>(tz);
  }
}

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  // align to the smaller exponent; shifts are exact
  int64_t e = std::min(a.exp_, b.exp_);
  mpz_class ma = a.man_ << static_cast<mp_bitcnt_t>(a.exp_ - e);
  mpz_class mb = b.man_ << static_cast<mp_bitcnt_t>(b.exp_ - e);
  return Dyadic(ma + mb, e);
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
  if (a.is_zero() || b.is_zero()) return Dyadic();
  return Dyadic(a.man_ * b.man_, a.exp_ + b.exp_);
}

int cmp(const Dyadic& a, const Dyadic& b) {
  int sa = a.sign(), sb = b.sign();
  if (sa != sb) return sa < sb ? -1 : 1;
  if (sa == 0) return 0;
  if (a.exp_ == b.exp_) return ::cmp(a.man_, b.man_) < 0 ? -1 : (a.man_ == b.man_ ? 0 : 1);
  int64_t e = std::min(a.exp_, b.exp_);
  mpz_class ma = a.man_ << static_cast<mp_bitcnt_t>(a.exp_ - e);
  mpz_class mb = b.man_ << static_cast<mp_bitcnt_t>(b.exp_ - e);
  int c = ::cmp(ma, mb);
  return c < 0 ? -1 : (c == 0 ? 0 : 1);
}

Dyadic Dyadic::round_to_grid(int64_t m, Round mode) const {
  if (on_grid(m)) return *this;
  // drop k low bits: value = man * 2^exp with exp < -m
  mp_bitcnt_t k = static_cast<mp_bitcnt_t>(-m - exp_);
  mpz_class q, r;
  mpz_fdiv_q_2exp(q.get_mpz_t(), man_.get_mpz_t(), k);
  mpz_fdiv_r_2exp(r.get_mpz_t(), man_.get_mpz_t(), k);  // r >= 0
  switch (mode) {
    case Round::down:
      break;
    case Round::up:
      if (r != 0) q += 1;
      break;
    case Round::nearest: {
      // ties toward +inf
      mpz_class twice = r << 1;
      mpz_class unit = mpz_class(1) << k;
      if (::cmp(twice, unit) >= 0) q += 1;
      break;
    }
  }
  return Dyadic(q, -m);
}

std::pair<Dyadic, Dyadic> Dyadic::round_bits(int64_t bits, Round mode) const {
  if (bits < 1) throw Error(Err::usage, "round_bits: bits must be >= 1");
  size_t len = bit_length();
  if (len <= static_cast<size_t>(bits)) return {*this, Dyadic()};
  int64_t drop = static_cast<int64_t>(len) - bits;
  // grid step 2^(exp_+drop); error bound: full step directed, half step nearest
  Dyadic v = round_to_grid(-(exp_ + drop), mode);
  Dyadic err = Dyadic::scaled(1, exp_ + drop - (mode == Round::nearest ? 1 : 0));
  return {v, err};
}

double Dyadic::to_double() const {
  if (is_zero()) return 0.0;
  // take top 64 bits and scale
  size_t len = bit_length();
  long shift = 0;
  mpz_class m = man_;
  if (len > 64) {
    shift = static_cast<long>(len - 64);
    m = man_ >> static_cast<mp_bitcnt_t>(shift);
  }
  double d = m.get_d();
  return std::ldexp(d, static_cast<int>(exp_ + shift));
}

std::string Dyadic::str() const {
  if (is_zero()) return "0";
  std::string m = man_.get_str(10);
  if (exp_ == 0) return m;
  return m + "*2^" + std::to_string(exp_);
}

std::string Dyadic::str_hex() const {
  if (is_zero()) return "0x0";
  std::string m = (man_ < 0 ? "-0x" : "0x") + mpz_class(::abs(man_)).get_str(16);
  if (exp_ == 0) return m;
  return m + "*2^" + std::to_string(exp_);
}

namespace {

Dyadic parse_decimal_fraction(const std::string& s) {
  // [-]digits[.digits] ; exact only when the fraction is dyadic
  auto dot = s.find('.');
  std::string ipart = s.substr(0, dot);
  std::string fpart = dot == std::string::npos ? "" : s.substr(dot + 1);
  bool neg = false;
  if (!ipart.empty() && (ipart[0] == '-' || ipart[0] == '+')) {
    neg = ipart[0] == '-';
    ipart = ipart.substr(1);
  }
  if (ipart.empty() && fpart.empty())
    throw Error(Err::usage, "empty numeric literal");
  for (char c : ipart + fpart)
    if (c < '0' || c > '9') throw Error(Err::usage, "bad numeric literal: " + s);
  mpz_class num(ipart.empty() ? "0" : ipart);
  int64_t k = static_cast<int64_t>(fpart.size());
  if (k > 0) {
    mpz_class f(fpart);
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(k));
    num = num * p10 + f;
    // num / 10^k = num / (2^k 5^k): dyadic iff 5^k divides num
    mpz_class p5, q, r;
    mpz_ui_pow_ui(p5.get_mpz_t(), 5, static_cast<unsigned long>(k));
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), p5.get_mpz_t());
    if (r != 0)
      throw Error(Err::usage, "decimal '" + s + "' is not an exact dyadic; use m*2^e form");
    return Dyadic(neg ? mpz_class(-q) : q, -k);
  }
  return Dyadic(neg ? mpz_class(-num) : num, 0);
}

}  // namespace

Dyadic Dyadic::parse(const std::string& s) {
  if (s.empty()) throw Error(Err::usage, "empty numeric literal");
  auto star = s.find("*2^");
  std::string mstr = s.substr(0, star);
  if (star == std::string::npos && s.find('.') != std::string::npos)
    return parse_decimal_fraction(s);
  bool neg = false;
  if (!mstr.empty() && (mstr[0] == '-' || mstr[0] == '+')) {
    neg = mstr[0] == '-';
    mstr = mstr.substr(1);
  }
  int base = 10;
  if (mstr.rfind("0x", 0) == 0 || mstr.rfind("0X", 0) == 0) {
    base = 16;
    mstr = mstr.substr(2);
  }
  if (mstr.empty()) throw Error(Err::usage, "bad numeric literal: " + s);
  mpz_class m;
  if (mpz_set_str(m.get_mpz_t(), mstr.c_str(), base) != 0)
    throw Error(Err::usage, "bad mantissa in: " + s);
  if (neg) m = -m;
  int64_t e = 0;
  if (star != std::string::npos) {
    std::string estr = s.substr(star + 3);
    try {
      e = std::stoll(estr);
    } catch (...) {
      throw Error(Err::usage, "bad exponent in: " + s);
    }
  }
  return Dyadic(m, e);
}

// sqrt bounds: scale so that the integer sqrt carries ~bits significant bits
static void sqrt_prepare(const Dyadic& x, int64_t bits, mpz_class& s, mpz_class& rem,
                         int64_t& half_exp) {
  if (x.sign() < 0) throw Error(Err::internal, "sqrt of negative dyadic");
  mpz_class m = x.mantissa();
  int64_t e = x.exponent();
  int64_t len = static_cast<int64_t>(mpz_sizeinbase(m.get_mpz_t(), 2));
  int64_t extra = 2 * bits - len + 2;
  if (extra < 0) extra = 0;
  if ((e - extra) % 2 != 0) extra += 1;
  m <<= static_cast<mp_bitcnt_t>(extra);
  e -= extra;
  mpz_sqrtrem(s.get_mpz_t(), rem.get_mpz_t(), m.get_mpz_t());
  half_exp = e / 2;
}

Dyadic sqrt_lower(const Dyadic& x, int64_t bits) {
  if (x.is_zero()) return Dyadic();
  mpz_class s, rem;
  int64_t he;
  sqrt_prepare(x, bits, s, rem, he);
  return Dyadic(s, he);  // floor sqrt: s^2 <= m
}

Dyadic sqrt_upper(const Dyadic& x, int64_t bits) {
  if (x.is_zero()) return Dyadic();
  mpz_class s, rem;
  int64_t he;
  sqrt_prepare(x, bits, s, rem, he);
  if (rem != 0) s += 1;  // (s+1)^2 > m
  return Dyadic(s, he);
}

}  // namespace jc
