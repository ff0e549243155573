#include "metrics/metrics.hpp"

#include "pixel/decide.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace jc {

namespace {

// exact squared Euclidean distance
Dyadic dist2(const DyadicPoint& a, const DyadicPoint& b) {
  Dyadic dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// exact per-norm comparable value: L1 distance itself, Euclid squared
Dyadic dist_key(const DyadicPoint& a, const DyadicPoint& b, Norm norm) {
  return norm == Norm::L1 ? norm1(a.x - b.x, a.y - b.y) : dist2(a, b);
}

RealInterval key_to_bracket(const Dyadic& key, Norm norm) {
  if (norm == Norm::L1) return RealInterval(key, key);
  return RealInterval(sqrt_lower(key, 64), sqrt_upper(key, 64));
}

void check_nonempty(const PointSet& A, const PointSet& B) {
  if (A.points.empty() || B.points.empty())
    throw Error(Err::usage, "set distance needs non-empty sets");
  if (A.ambient_norm != B.ambient_norm)
    throw Error(Err::usage, "set distance needs a common ambient norm");
}

int64_t ifloor_scaled(const Dyadic& v, int64_t e) {
  Dyadic g = v.mul_pow2(-e).round_to_grid(0, Round::down);
  if (g.is_zero()) return 0;
  mpz_class m = g.mantissa() << size_t(g.exponent());
  if (!m.fits_slong_p()) throw Error(Err::internal, "bucket index overflow");
  return m.get_si();
}

}  // namespace

const char* norm_name(Norm n) { return n == Norm::L1 ? "L1" : "Euclid"; }

RealInterval one_sided_dist_brute(const PointSet& A, const PointSet& B) {
  check_nonempty(A, B);
  const Norm norm = A.ambient_norm;
  Dyadic worst;
  bool first_a = true;
  for (const auto& a : A.points) {
    Dyadic best;
    bool first_b = true;
    for (const auto& b : B.points) {
      Dyadic k = dist_key(a, b, norm);
      if (first_b || k < best) {
        best = k;
        first_b = false;
      }
    }
    if (first_a || best > worst) {
      worst = best;
      first_a = false;
    }
  }
  return key_to_bracket(worst, norm);
}

RealInterval one_sided_dist(const PointSet& A, const PointSet& B) {
  check_nonempty(A, B);
  const Norm norm = A.ambient_norm;
  const size_t nb = B.points.size();
  if (nb <= 64 || A.points.size() <= 4) return one_sided_dist_brute(A, B);

  // uniform power-of-two buckets over B's bounding box
  Dyadic xlo = B.points[0].x, xhi = xlo, ylo = B.points[0].y, yhi = ylo;
  for (const auto& b : B.points) {
    xlo = min(xlo, b.x);
    xhi = max(xhi, b.x);
    ylo = min(ylo, b.y);
    yhi = max(yhi, b.y);
  }
  double extent = std::max((xhi - xlo).to_double(), (yhi - ylo).to_double());
  if (!(extent > 0)) return one_sided_dist_brute(A, B);
  int64_t e = int64_t(std::floor(std::log2(extent / std::sqrt(double(nb)) + 1e-300)));
  // keep the lattice small enough that indices stay sane
  while (extent / std::ldexp(1.0, int(e)) > 4096.0) ++e;

  std::map<std::pair<int64_t, int64_t>, std::vector<const DyadicPoint*>> buckets;
  int64_t bx0 = 0, bx1 = 0, by0 = 0, by1 = 0;
  bool first_bucket = true;
  for (const auto& b : B.points) {
    int64_t bx = ifloor_scaled(b.x, e), by = ifloor_scaled(b.y, e);
    buckets[{bx, by}].push_back(&b);
    if (first_bucket) {
      bx0 = bx1 = bx;
      by0 = by1 = by;
      first_bucket = false;
    } else {
      bx0 = std::min(bx0, bx);
      bx1 = std::max(bx1, bx);
      by0 = std::min(by0, by);
      by1 = std::max(by1, by);
    }
  }

  const Dyadic h = Dyadic::scaled(1, e);
  Dyadic worst;
  bool first_a = true;
  for (const auto& a : A.points) {
    int64_t ax = ifloor_scaled(a.x, e), ay = ifloor_scaled(a.y, e);
    // points far outside B's box would walk many empty rings; scan directly
    int64_t gap = std::max<int64_t>(
        {int64_t(0), bx0 - ax, ax - bx1, by0 - ay, ay - by1});
    if (gap > 64) {
      Dyadic best;
      bool have = false;
      for (const auto& b : B.points) {
        Dyadic k = dist_key(a, b, norm);
        if (!have || k < best) {
          best = k;
          have = true;
        }
      }
      if (first_a || best > worst) {
        worst = best;
        first_a = false;
      }
      continue;
    }
    Dyadic best;
    bool have_best = false;
    for (int64_t ring = 0;; ++ring) {
      // every unvisited point is at least (ring-1) buckets away in max norm;
      // in both norms that distance is at least (ring-1)*h
      if (have_best && ring >= 2) {
        Dyadic lb = h * Dyadic(long(ring - 1));
        Dyadic lb_key = norm == Norm::L1 ? lb : lb * lb;
        if (lb_key >= best) break;
      }
      bool any_bucket = false;
      for (int64_t dx = -ring; dx <= ring; ++dx) {
        for (int64_t dy = -ring; dy <= ring; ++dy) {
          if (std::max(std::llabs(dx), std::llabs(dy)) != ring) continue;
          auto it = buckets.find({ax + dx, ay + dy});
          if (it == buckets.end()) continue;
          any_bucket = true;
          for (const DyadicPoint* b : it->second) {
            Dyadic k = dist_key(a, *b, norm);
            if (!have_best || k < best) {
              best = k;
              have_best = true;
            }
          }
        }
      }
      (void)any_bucket;
      if (ring > 8192) throw Error(Err::internal, "bucket ring runaway");
    }
    if (first_a || best > worst) {
      worst = best;
      first_a = false;
    }
  }
  return key_to_bracket(worst, norm);
}

RealInterval hausdorff(const PointSet& A, const PointSet& B) {
  RealInterval ab = one_sided_dist(A, B);
  RealInterval ba = one_sided_dist(B, A);
  return RealInterval(max(ab.lo(), ba.lo()), max(ab.hi(), ba.hi()));
}

GridSets grid_sets(const GridImage& img, Norm norm) {
  GridSets out;
  out.J_proxy.ambient_norm = norm;
  out.K_proxy.ambient_norm = norm;
  out.Out_proxy.ambient_norm = norm;
  for (int64_t j = 0; j < img.ny; ++j) {
    for (int64_t i = 0; i < img.nx; ++i) {
      CellState s = img.at(i, j);
      DyadicPoint p(img.cell_x(i), img.cell_y(j), img.n);
      if (s == CellState::out) {
        out.Out_proxy.points.push_back(p);
        continue;
      }
      out.K_proxy.points.push_back(p);
      if (s != CellState::in) continue;
      // boundary sample: an In cell touching any non-In cell (cells beyond
      // the image count as unknown, hence non-In)
      bool edge = false;
      for (int64_t dj = -1; dj <= 1 && !edge; ++dj)
        for (int64_t di = -1; di <= 1 && !edge; ++di) {
          if (di == 0 && dj == 0) continue;
          int64_t ii = i + di, jj = j + dj;
          if (ii < 0 || jj < 0 || ii >= img.nx || jj >= img.ny)
            edge = true;
          else if (img.at(ii, jj) != CellState::in)
            edge = true;
        }
      if (edge) out.J_proxy.points.push_back(p);
    }
  }
  return out;
}

SemicontinuityResult semicontinuity_probe(OracleTape& c_hat, const Dyadic& epsilon,
                                          int64_t n, int64_t trials, uint64_t seed) {
  if (trials <= 0) throw Error(Err::usage, "semicontinuity probe needs trials >= 1");
  if (n < 3) throw Error(Err::usage, "semicontinuity probe needs n >= 3");
  if (!(epsilon > Dyadic::scaled(1, -(n - 2))))
    throw Error(Err::usage, "epsilon must exceed 2^-(n-2) to be grid-resolvable");

  SemicontinuityResult res;
  CostMeter meter;
  Ball chat = c_hat.c_ball(n + 30, meter);

  // the largest tested delta is the power of two at or below epsilon/4
  int64_t d0 = 2;
  while (Dyadic::scaled(1, -d0) > epsilon.mul_pow2(-2)) ++d0;

  // every J_c and K_c in play lies in the closed disk of radius
  // (1 + sqrt(1+4|c|))/2; one pitch of margin keeps border cells honest
  Dyadic cu = chat.abs_bracket(64).hi() + epsilon;
  Dyadic R = (Dyadic(1) + sqrt_upper(Dyadic(1) + cu.mul_pow2(2), 64)).mul_pow2(-1) +
             Dyadic::scaled(1, -(n - 1));
  R = min(R, Dyadic(2) + Dyadic::scaled(1, -(n - 1)));
  GridRegion region{-R, R, -R, R};

  GridImage img_hat = render_grid(region, n, c_hat, nullptr);
  ++res.renders;
  GridSets hat = grid_sets(img_hat);
  const Dyadic bound = epsilon + Dyadic::scaled(1, -(n - 1));  // pitch slack

  std::mt19937_64 eng(seed);
  for (int64_t k = d0; k <= n; ++k) {
    Dyadic delta = Dyadic::scaled(1, -k);
    bool pass = true;
    for (int64_t t = 0; t < trials && pass; ++t) {
      // odd 53-bit numerator: a nonzero offset in (-1, 1), exactly dyadic
      int64_t v = int64_t(eng() >> 11);
      Dyadic u = Dyadic::scaled(2 * long(v) + 1 - (long(1) << 53), -53);
      Dyadic cre = (chat.re() + u * delta).round_to_grid(n + 20, Round::nearest);
      DyadicOracle oc(cre, chat.im());
      GridImage img_c = render_grid(region, n, oc, nullptr);
      ++res.renders;
      GridSets sc = grid_sets(img_c);
      auto fail = [&](const std::string& what) {
        res.findings.push_back("delta=2^-" + std::to_string(k) + " trial=" +
                               std::to_string(t) + " c=" + cre.str() + ": " + what);
        pass = false;
      };
      if (hat.J_proxy.points.empty() || sc.J_proxy.points.empty()) {
        fail("empty J proxy");
        continue;
      }
      RealInterval dj = one_sided_dist(hat.J_proxy, sc.J_proxy);
      if (!(dj.hi() <= bound)) fail("dist(J_hat -> J_c) = " + dj.hi().str());
      if (pass) {
        RealInterval dk = one_sided_dist(sc.K_proxy, hat.K_proxy);
        if (!(dk.hi() <= bound)) fail("dist(K_c -> K_hat) = " + dk.hi().str());
      }
    }
    if (pass) {
      res.delta = delta;
      res.found = true;
      return res;
    }
  }
  return res;
}

}  // namespace jc
