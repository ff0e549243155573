// Complex balls: exact dyadic center, exact dyadic radius, outward rounding
// applied once per operation at the working precision.
#pragma once

#include "num/interval.hpp"

namespace jc {

struct Precision {
  int64_t working_bits;
  explicit Precision(int64_t b) : working_bits(b) {
    if (b < 8) throw Error(Err::usage, "working_bits must be >= 8");
  }
};

// grid point of size n: coordinates are integer multiples of 2^-n
struct DyadicPoint {
  Dyadic x, y;
  int64_t n;
  DyadicPoint(const Dyadic& px, const Dyadic& py, int64_t size) : x(px), y(py), n(size) {
    if (!x.on_grid(n) || !y.on_grid(n))
      throw Error(Err::usage, "point is not on the 2^-n grid");
  }
};

// max(|x|,|y|): the norm the pixel model measures distances in
inline Dyadic norm1(const Dyadic& x, const Dyadic& y) { return max(x.abs(), y.abs()); }

class Ball {
 public:
  Ball() : re_(), im_(), rad_() {}
  Ball(const Dyadic& re, const Dyadic& im, const Dyadic& rad = Dyadic())
      : re_(re), im_(im), rad_(rad) {
    if (rad_.sign() < 0) throw Error(Err::internal, "negative ball radius");
  }
  static Ball whole_plane() {
    Ball b;
    b.whole_ = true;
    return b;
  }

  const Dyadic& re() const { return re_; }
  const Dyadic& im() const { return im_; }
  const Dyadic& rad() const { return rad_; }
  bool is_whole_plane() const { return whole_; }
  bool is_exact() const { return !whole_ && rad_.is_zero(); }

  // exact membership test for a dyadic point
  bool contains(const Dyadic& px, const Dyadic& py) const {
    if (whole_) return true;
    Dyadic dx = px - re_, dy = py - im_;
    return dx * dx + dy * dy <= rad_ * rad_;
  }

  // Euclidean |center| enclosure
  RealInterval center_abs(int64_t bits) const;
  // Euclidean |z| enclosure over the whole ball (lower clamped at 0)
  RealInterval abs_bracket(int64_t bits) const;

 private:
  Dyadic re_, im_, rad_;
  bool whole_ = false;
  friend Ball ball_add(const Ball&, const Ball&, const Precision&);
  friend Ball ball_mul(const Ball&, const Ball&, const Precision&);
  friend Ball ball_sqr(const Ball&, const Precision&);
  friend Ball ball_step(const Ball&, const Ball&, const Precision&);
  friend Ball ball_widen(const Ball&, const Dyadic&);
};

Ball ball_add(const Ball& a, const Ball& b, const Precision& prec);
Ball ball_mul(const Ball& a, const Ball& b, const Precision& prec);
Ball ball_sqr(const Ball& a, const Precision& prec);
// one certified iteration z^2 + c
Ball ball_step(const Ball& z, const Ball& c, const Precision& prec);
Ball ball_widen(const Ball& a, const Dyadic& extra_rad);

}  // namespace jc
