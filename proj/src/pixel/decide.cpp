#include "pixel/decide.hpp"

#include <array>
#include <utility>

namespace jc {

namespace {

enum class OrbitClass { bounded, escaped, undecided };

struct OrbitStatus {
  OrbitClass cls = OrbitClass::undecided;
  int64_t steps = 0;
};

// one certified pass deciding which side of J_c the orbit settles on: into a
// trap (bounded for every point of the ball) or past the escape radius
OrbitStatus classify_orbit(const Ball& z0, const Ball& c, const TrapSet& traps,
                           int64_t cap, const Precision& prec, CostMeter& meter) {
  Dyadic r_esc = max(Dyadic(2), c.abs_bracket(64).hi());
  Ball z = z0;
  for (int64_t k = 0;; ++k) {
    if (ball_in_traps(z, traps, prec)) return {OrbitClass::bounded, k};
    if (z.abs_bracket(64).lo() > r_esc) return {OrbitClass::escaped, k};
    if (k == cap || z.rad() > Dyadic(256)) break;
    z = ball_step(z, c, prec);
    meter.charge(1);
  }
  return {OrbitClass::undecided, cap};
}

const Dyadic& inv_sqrt2_lo() {
  static const Dyadic v = inv_sqrt2_bracket(64).lo();
  return v;
}

// exact max-norm lower bound from the universal enclosure: J_c lies in the
// closed Euclidean disk of radius 2, hence in the square [-2,2]^2
Dyadic far_field_lower(const Dyadic& x, const Dyadic& y) {
  Dyadic lower = norm1(x, y) - Dyadic(2);
  Dyadic l2 = sqrt_lower(x * x + y * y, 64) - Dyadic(2);
  if (l2.sign() > 0) lower = max(lower, l2 * inv_sqrt2_lo());
  return lower;
}

}  // namespace

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::certified_far: return "certified_far";
    case Provenance::certified_near: return "certified_near";
    default: return "borderline";
  }
}

PixelAnswer decide_pixel(const PixelQuery& q, OracleTape& oracle, CostMeter& meter,
                         DecideContext* ctx, const DecideLimits* limits) {
  const Dyadic& x = q.point.x;
  const Dyadic& y = q.point.y;
  const int64_t n = q.n;
  const Dyadic band_lo = Dyadic::scaled(1, -n);
  const Dyadic band_hi = Dyadic::scaled(1, -(n - 1));
  const Dyadic t_far = Dyadic::scaled(17, -(n + 3));  // > 2*2^-n: full far certificate
  const Dyadic t_near = Dyadic::scaled(1, -(n + 1));  // half pixel: full near certificate
  const Precision prec = decide_working_precision(n);

  DecideLimits def;
  const DecideLimits& lim = limits ? *limits : def;
  const int64_t escape_cap = lim.escape_cap > 0 ? lim.escape_cap : 192 + 8 * n;
  CoverBudget cvb = lim.cover;
  if (cvb.tick_cap == 0) cvb.tick_cap = 2048 + 512 * n;  // keep worst pixels bounded

  DecideContext local;
  DecideContext& cache = ctx ? *ctx : local;

  PixelAnswer ans;
  CertRecord& rec = ans.record;
  auto answer = [&](int bit, Provenance prov, const char* method) {
    ans.bit = bit;
    ans.provenance = prov;
    rec.method = method;
    return ans;
  };
  auto far_answer = [&](const char* method, const Dyadic& lower) {
    rec.lower_inf = lower;
    return answer(0, Provenance::certified_far, method);
  };
  auto near_answer = [&](const char* method, const Dyadic& upper) {
    rec.upper_inf = upper;
    rec.upper_finite = true;
    return answer(1, Provenance::certified_near, method);
  };

  Dyadic best_lower = far_field_lower(x, y);
  const char* lower_src = "far_field";
  if (best_lower > band_hi) return far_answer("far_field", best_lower);
  if (best_lower.sign() < 0) best_lower = Dyadic();

  const int64_t m0 = decide_oracle_precision(n);
  auto cball_at = [&](int64_t m) -> const Ball& {
    auto it = cache.cballs.find(m);
    if (it == cache.cballs.end()) it = cache.cballs.emplace(m, oracle.c_ball(m, meter)).first;
    if (m > rec.oracle_m) rec.oracle_m = m;
    return it->second;
  };
  auto traps_at = [&](int64_t m) -> const TrapSet& {
    auto it = cache.traps.find(m);
    if (it == cache.traps.end())
      it = cache.traps.emplace(m, find_traps(cball_at(m), prec, meter)).first;
    return it->second;
  };
  const Ball& cb = cball_at(m0);
  const TrapSet& traps = traps_at(m0);
  if (!cache.connected_known) {
    cache.connected_value = connectedness_certified(oracle.descriptor(), cb);
    cache.connected_known = true;
  }

  Ball zq(x, y);
  OrbitStatus side = classify_orbit(zq, cb, traps, escape_cap, prec, meter);

  bool have_upper = false;
  Dyadic best_upper;
  if (side.cls == OrbitClass::escaped && cache.connected_value) {
    if (auto br = exterior_bracket(zq, cb, lim.koebe_cap, prec, meter)) {
      Dyadic l_inf = br->first * inv_sqrt2_lo();
      if (l_inf > best_lower) {
        best_lower = l_inf;
        lower_src = "koebe";
      }
      best_upper = br->second;  // max norm <= Euclidean
      have_upper = true;
      if (best_lower > band_hi) return far_answer("koebe", best_lower);
      if (best_upper < band_lo) return near_answer("koebe", best_upper);
    }
  }

  // full far certificate: the closed square of half-width t_far misses J_c
  // whenever it is all escaping or all bounded (J_c = boundary of the basin
  // of infinity, so it cannot enter the interior of a one-sided square)
  if (!(have_upper && best_upper < t_far)) {
    CoverOutcome far =
        cover_region(x, y, t_far, RegionShape::max_square, cb, traps, cvb, prec, meter);
    if (far.verdict == RegionVerdict::all_escaping) return far_answer("cover_escaping", t_far);
    if (far.verdict == RegionVerdict::all_bounded) return far_answer("cover_bounded", t_far);
  }
  if (best_lower >= band_lo) {
    rec.lower_inf = best_lower;
    return answer(0, Provenance::borderline, lower_src);
  }

  // full near certificate: a certified bounded point and a certified escaping
  // point in the closed square of half-width t_near force J_c to cross it.
  // Partner search wants witness enclosures far tighter than the pixel, so
  // it reads the oracle deeper than the base schedule.
  if (best_lower <= t_near) {
    const int64_t m_w = decide_partner_precision(n);
    const TrapSet& traps_w = traps_at(m_w);
    if (side.cls == OrbitClass::escaped) {
      if (auto b = bounded_candidate_near(x, y, t_near, traps_w, prec, meter)) {
        rec.bx = b->bx;
        rec.by = b->by;
        rec.ex = x;
        rec.ey = y;
        return near_answer("pair", t_near);
      }
    } else {
      // bounded side of the pair: the center itself when its orbit was
      // certified bounded, otherwise a trap point or K-point witness nearby
      bool have_b = side.cls == OrbitClass::bounded;
      Dyadic bx = x, by = y;
      if (!have_b) {
        if (auto b = bounded_candidate_near(x, y, t_near, traps_w, prec, meter)) {
          have_b = true;
          bx = b->bx;
          by = b->by;
        }
      }
      if (have_b) {
        // probe ring: any certified escaping probe inside the square
        // completes the pair; probes landing in traps cannot escape
        const Dyadic d7 = Dyadic::scaled(7, -(n + 4));
        const std::array<std::pair<int, int>, 8> dirs{
            {{0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}, {1, 0}, {-1, 0}}};
        for (auto [ux, uy] : dirs) {
          Dyadic px = ux == 0 ? x : (ux > 0 ? x + d7 : x - d7);
          Dyadic py = uy == 0 ? y : (uy > 0 ? y + d7 : y - d7);
          if (ball_in_traps(Ball(px, py), traps_w, prec)) continue;
          EscapeResult er = certify_escape(Ball(px, py), cb, escape_cap, prec, meter);
          if (er.status == EscapeStatus::escaped) {
            rec.bx = bx;
            rec.by = by;
            rec.ex = px;
            rec.ey = py;
            return near_answer("pair", t_near);
          }
        }
      }
    }
    CoverOutcome near =
        cover_region(x, y, t_near, RegionShape::max_square, cb, traps, cvb, prec, meter);
    if (near.verdict == RegionVerdict::mixed_pair && near.has_pair) {
      rec.bx = near.bnd_x;
      rec.by = near.bnd_y;
      rec.ex = near.esc_x;
      rec.ey = near.esc_y;
      return near_answer("pair", t_near);
    }
    if (near.verdict == RegionVerdict::all_bounded || near.verdict == RegionVerdict::all_escaping) {
      if (t_near > best_lower) {
        best_lower = t_near;
        lower_src = near.verdict == RegionVerdict::all_bounded ? "cover_bounded" : "cover_escaping";
      }
    }
  }

  // band: dist >= 2^-n makes 0 sound, a pair within 2^-n makes 1 sound
  CoverOutcome mid =
      cover_region(x, y, band_lo, RegionShape::max_square, cb, traps, cvb, prec, meter);
  if (mid.verdict == RegionVerdict::all_escaping || mid.verdict == RegionVerdict::all_bounded) {
    rec.lower_inf = band_lo;
    return answer(0, Provenance::borderline,
                  mid.verdict == RegionVerdict::all_bounded ? "cover_bounded" : "cover_escaping");
  }
  if (mid.verdict == RegionVerdict::mixed_pair && mid.has_pair) {
    rec.upper_inf = band_lo;
    rec.upper_finite = true;
    rec.bx = mid.bnd_x;
    rec.by = mid.bnd_y;
    rec.ex = mid.esc_x;
    rec.ey = mid.esc_y;
    return answer(1, Provenance::borderline, "pair");
  }

  rec.lower_inf = best_lower;
  return answer(1, Provenance::borderline, "fallback");
}

}  // namespace jc
