// Real intervals with exact dyadic endpoints; rounding is explicit and outward.
#pragma once

#include "num/dyadic.hpp"

namespace jc {

class RealInterval {
 public:
  RealInterval() = default;
  RealInterval(const Dyadic& p) : lo_(p), hi_(p) {}
  RealInterval(const Dyadic& lo, const Dyadic& hi) : lo_(lo), hi_(hi) {
    if (hi < lo) throw Error(Err::internal, "interval endpoints out of order");
  }

  const Dyadic& lo() const { return lo_; }
  const Dyadic& hi() const { return hi_; }
  Dyadic width() const { return hi_ - lo_; }
  Dyadic mid() const { return (lo_ + hi_).mul_pow2(-1); }
  Dyadic rad_upper() const { return width().mul_pow2(-1); }
  bool is_point() const { return lo_ == hi_; }
  bool contains(const Dyadic& v) const { return lo_ <= v && v <= hi_; }
  bool contains(const RealInterval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool contains_interior(const RealInterval& o) const { return lo_ < o.lo_ && o.hi_ < hi_; }
  bool disjoint(const RealInterval& o) const { return hi_ < o.lo_ || o.hi_ < lo_; }
  bool strictly_positive() const { return lo_.sign() > 0; }
  bool strictly_negative() const { return hi_.sign() < 0; }
  bool contains_zero() const { return lo_.sign() <= 0 && hi_.sign() >= 0; }

  RealInterval operator-() const { return RealInterval(-hi_, -lo_); }
  friend RealInterval operator+(const RealInterval& a, const RealInterval& b) {
    return RealInterval(a.lo_ + b.lo_, a.hi_ + b.hi_);
  }
  friend RealInterval operator-(const RealInterval& a, const RealInterval& b) {
    return a + (-b);
  }
  friend RealInterval operator*(const RealInterval& a, const RealInterval& b);

  RealInterval sqr() const;  // tighter than self-multiplication
  RealInterval abs() const;
  RealInterval mul_pow2(int64_t k) const {
    return RealInterval(lo_.mul_pow2(k), hi_.mul_pow2(k));
  }

  // outward rounding to ~bits significant bits per endpoint
  RealInterval rounded(int64_t bits) const {
    return RealInterval(lo_.round_bits(bits, Round::down).first,
                        hi_.round_bits(bits, Round::up).first);
  }

  RealInterval intersect(const RealInterval& o) const {
    Dyadic l = max(lo_, o.lo_), h = min(hi_, o.hi_);
    if (h < l) throw Error(Err::internal, "empty interval intersection");
    return RealInterval(l, h);
  }
  friend RealInterval hull(const RealInterval& a, const RealInterval& b) {
    return RealInterval(min(a.lo_, b.lo_), max(a.hi_, b.hi_));
  }

 private:
  Dyadic lo_, hi_;
};

// enclosure of a/b, 0 not in b; directed rounding with ~bits significant bits
RealInterval idiv(const RealInterval& a, const RealInterval& b, int64_t bits);
// directed quotient of dyadics (b != 0)
Dyadic div_dir(const Dyadic& a, const Dyadic& b, int64_t bits, Round mode);

// enclosures of classical functions, argument validated by the caller
RealInterval isqrt(const RealInterval& x, int64_t bits);              // x >= 0
RealInterval ilog(const RealInterval& x, int64_t bits);               // x > 0
RealInterval iexp(const RealInterval& x, int64_t bits);
RealInterval iexpm1(const RealInterval& x, int64_t bits);             // x >= 0, e^x - 1 without cancellation
const RealInterval& ln2_bracket(int64_t bits);                        // cached
const RealInterval& inv_sqrt2_bracket(int64_t bits);                  // cached

}  // namespace jc
