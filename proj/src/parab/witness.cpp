#include "parab/witness.hpp"

#include "pixel/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace jc {

namespace {

Dyadic circ_dist(const Dyadic& a, const Dyadic& b) {
  Dyadic d = (a - b).abs();
  return min(d, Dyadic(1) - d);
}

// Double-precision Milnor exterior distance estimate for real c: roughly
// dist(z, J_c) up to a bounded factor. Heuristic only; every claim the
// witness makes is re-established with certified arithmetic afterwards.
double milnor_estimate(double zx, double zy, double cr, int cap = 40000) {
  double x = zx, y = zy, dx = 1, dy = 0;
  for (int k = 0; k < cap; ++k) {
    double ndx = 2 * (x * dx - y * dy), ndy = 2 * (x * dy + y * dx);
    double nx = x * x - y * y + cr, ny = 2 * x * y;
    dx = ndx;
    dy = ndy;
    x = nx;
    y = ny;
    double r2 = x * x + y * y;
    if (r2 > 1e16) {
      double r = std::sqrt(r2), dr = std::hypot(dx, dy);
      return r * std::log(r) / dr;
    }
    if (dx * dx + dy * dy > 1e280) return 0.0;  // hugging the boundary
  }
  return -1.0;  // did not escape: treat as inside the filled set
}

std::string phase_str(const Dyadic& p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", p.to_double());
  return buf;
}

}  // namespace

bool verify_witness(const ParabolicRoot& root, const DiscontinuityWitness& w,
                    int64_t extra_n, int64_t extra_m,
                    const WitnessBudget& budget, std::string* why) {
  auto fail = [&](const std::string& s) {
    if (why) *why = s;
    return false;
  };
  if (!(w.c1 > root.c.hi()) || !(w.c2 > root.c.hi()))
    return fail("parameters do not lie strictly above the root");
  const int64_t l = w.n;
  const int64_t n_check = l + extra_n;

  // near: a certified distance bracket at c1 pins the invariant
  // "the boundary meets the 2^-l ball around z0" with a 2^4 margin
  {
    DyadicOracle o1(w.c1, Dyadic());
    CostMeter meter;
    DistanceBracket db =
        distance_estimate(w.z0, o1, meter, l + 5 + extra_m, budget.dist_budget);
    Dyadic thr = Dyadic::scaled(1, -(l + 4));
    if (db.undecided || db.upper_infinite || db.upper > thr)
      return fail("near check: no certified dist <= 2^-(l+4) at c1");
  }

  // far: an escape cover of the Euclidean disk of radius 16*2^-l at c2
  // certifies "the filled set misses the 16*2^-l ball", which subsumes both
  // the 2^-(l-1) ball and the 8*2^-l escape-set disk
  {
    DyadicOracle o2(w.c2, Dyadic());
    CostMeter meter;
    Precision prec = decide_working_precision(n_check);
    Ball cball = o2.c_ball(decide_oracle_precision(n_check) + extra_m, meter);
    TrapSet traps = find_traps(cball, prec, meter);
    CoverBudget cb;
    cb.max_cells = budget.cover_cells;
    cb.iter_cap = 2048;
    cb.max_depth = 14;
    cb.tick_cap = budget.cover_ticks;
    CoverOutcome co =
        cover_region(w.z0.x, w.z0.y, Dyadic::scaled(16, -l),
                     RegionShape::euclid_disk, cball, traps, cb, prec, meter);
    if (co.verdict != RegionVerdict::all_escaping)
      return fail("far check: disk not certified escaping at c2");
  }

  // proxy: a certified patch render at c1 must place a boundary-proxy cell
  // within 2^-l/10 of the pixel
  {
    DyadicOracle o1(w.c1, Dyadic());
    int64_t nr = l + 4 + extra_n;
    // the probe needs boundary cells out to 2^-l/10 plus slack; the finer
    // re-verification patch shrinks its half-width to bound the cell count
    Dyadic half =
        extra_n == 0
            ? div_dir(Dyadic::scaled(1, -l), Dyadic(5), 40, Round::up)
            : div_dir(Dyadic::scaled(3, -l), Dyadic(25), 40, Round::up);
    GridRegion reg{w.z0.x - half, w.z0.x + half, w.z0.y - half, w.z0.y + half};
    GridImage img = render_grid(reg, nr, o1);
    GridSets gs = grid_sets(img, Norm::Euclid);
    if (gs.J_proxy.points.empty())
      return fail("proxy check: patch render has no boundary cells");
    PointSet a;
    a.ambient_norm = Norm::Euclid;
    a.points.push_back(w.z0);
    RealInterval dj = one_sided_dist(a, gs.J_proxy);
    Dyadic thr = div_dir(Dyadic::scaled(1, -l), Dyadic(10), 60, Round::down);
    if (!(dj.hi() < thr))
      return fail("proxy check: nearest boundary cell beyond 2^-l/10");
  }
  return true;
}

DiscontinuityWitness find_discontinuity_witness(const ParabolicRoot& root,
                                                int64_t l,
                                                const WitnessBudget& budget,
                                                WitnessSearchReport* report) {
  WitnessSearchReport local_rep;
  WitnessSearchReport& rep = report ? *report : local_rep;
  if (root.c.contains(Dyadic::scaled(1, -2)))
    throw Error(Err::usage,
                "excluded root: the discontinuity construction requires the "
                "root to differ from 1/4");
  if (l < 6) throw Error(Err::usage, "witness size l must be >= 6");
  if (budget.eps_count <= 0)
    throw Error(Err::not_found,
                "witness search budget empty: no epsilon was tried");

  ParabolicRoot r = root.c.width() <= Dyadic::scaled(1, -80)
                        ? root
                        : refine_root(root, 80);
  RealInterval gate = default_gate(r);
  Dyadic rhat = r.c.hi().round_to_grid(60, Round::up);

  // calibration window: shrink from 2^-8 until the top epsilon is workable
  Dyadic eps_hi = Dyadic::scaled(1, -8);
  ImplosionCalibration cal;
  bool cal_ok = false;
  for (int tries = 0; tries < 5 && !cal_ok; ++tries) {
    try {
      cal = calibrate_phase(r, gate, eps_hi, eps_hi.mul_pow2(-14), 10);
      cal_ok = true;
    } catch (const Error& e) {
      if (e.code != Err::usage) throw;
      eps_hi = eps_hi.mul_pow2(-2);
    }
  }
  if (!cal_ok)
    throw Error(Err::not_found, "no workable epsilon window for calibration");

  // phase sweep along the geometric grid eps_hi * 0.93^j
  struct Sweep {
    Dyadic eps, c, phase;
  };
  std::vector<Sweep> sw;
  double e0 = eps_hi.to_double();
  for (int64_t j = 0; j < budget.eps_count; ++j) {
    double ed = e0 * std::pow(0.93, (double)j);
    Dyadic eps =
        Dyadic::scaled((long)std::llround(ed * std::ldexp(1.0, 60)), -60);
    if (!(eps.sign() > 0)) break;
    Dyadic c = rhat + eps;
    try {
      ImplosionSample s = phase_proxy_at(r, c, gate, &cal);
      sw.push_back({eps, c, s.phase_proxy});
    } catch (const Error& e) {
      if (e.code != Err::usage) throw;  // skip epsilons outside the window
    }
  }
  rep.eps_tried = (int64_t)sw.size();
  {
    int64_t bins[10] = {0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
    for (auto& s : sw) {
      long b = (long)(s.phase.to_double() * 10.0);
      if (b < 0) b = 0;
      if (b > 9) b = 9;
      bins[b]++;
    }
    int best = 0;
    for (int b = 1; b < 10; ++b)
      if (bins[b] > bins[best]) best = b;
    rep.densest_phase =
        div_dir(Dyadic(2 * best + 1), Dyadic(20), 20, Round::down);
    rep.densest_count = bins[best];
  }

  // pair sweep points with distinct phases; prefer a wide epsilon ratio,
  // since the far side needs a parameter whose boundary has retreated from
  // the window (largest eps) while hairs to pin the near side densify as
  // eps shrinks (a < b means eps_a > eps_b on the descending ladder)
  struct PhasePair {
    size_t a, b;
  };
  std::vector<PhasePair> pairs;
  Dyadic min_sep = div_dir(Dyadic(3), Dyadic(20), 20, Round::down);
  for (size_t a = 0; a < sw.size(); ++a)
    for (size_t b = a + 1; b < sw.size(); ++b) {
      if (circ_dist(sw[a].phase, sw[b].phase) >= min_sep) pairs.push_back({a, b});
    }
  std::sort(pairs.begin(), pairs.end(),
            [](const PhasePair& x, const PhasePair& y) {
              if (x.a != y.a) return x.a < y.a;
              return x.b > y.b;
            });
  if ((int64_t)pairs.size() > budget.max_pairs) pairs.resize(budget.max_pairs);

  // candidate lattice: pixels of size l across the gate neighborhood of the
  // parabolic fixed point, kept above the real axis by more than the
  // 2^-(l-1) far-disk radius (the real spine of the filled set is invariant)
  const Dyadic pitch = Dyadic::scaled(1, -l);
  const double pd = pitch.to_double();
  Dyadic cx = r.alpha.mid().round_to_grid(l, Round::nearest);
  const double cxd = cx.to_double();
  const int64_t imax = int64_t(1) << (l - 6);
  const int64_t jmin = 17;
  const int64_t jmax = int64_t(1) << (l - 5);
  if (jmax < jmin)
    throw Error(Err::not_found,
                "witness window is empty at this size: the axis clearance "
                "17*2^-l exceeds the search band");
  const size_t npts = (size_t)(2 * imax + 1) * (size_t)(jmax - jmin + 1);

  // heuristic exterior-distance fields, one per sweep parameter, lazily
  std::map<size_t, std::vector<double>> fields;
  auto field = [&](size_t idx) -> const std::vector<double>& {
    auto it = fields.find(idx);
    if (it != fields.end()) return it->second;
    std::vector<double> f(npts);
    double cd = sw[idx].c.to_double();
    size_t k = 0;
    for (int64_t i = -imax; i <= imax; ++i)
      for (int64_t j = jmin; j <= jmax; ++j)
        f[k++] = milnor_estimate(cxd + (double)i * pd, (double)j * pd, cd);
    return fields.emplace(idx, std::move(f)).first->second;
  };

  const Dyadic thr_near = Dyadic::scaled(1, -(l + 4));
  for (const PhasePair& pp : pairs) {
    for (int ord = 0; ord < 2; ++ord) {
      size_t s1 = ord == 0 ? pp.b : pp.a;  // near parameter (smaller eps first)
      size_t s2 = ord == 0 ? pp.a : pp.b;  // far parameter (larger eps first)
      ++rep.pairs_tried;
      const std::vector<double>& d1 = field(s1);
      const std::vector<double>& d2 = field(s2);

      struct Cand {
        int64_t i, j;
        double near_d, far_d;
      };
      std::vector<Cand> cands;
      size_t k = 0;
      for (int64_t i = -imax; i <= imax; ++i)
        for (int64_t j = jmin; j <= jmax; ++j, ++k) {
          if (!(d1[k] > 0) || d1[k] > 0.06 * pd) continue;
          if (d2[k] < 40.0 * pd) continue;
          cands.push_back({i, j, d1[k], d2[k]});
        }
      std::sort(cands.begin(), cands.end(), [](const Cand& u, const Cand& v) {
        if (u.near_d != v.near_d) return u.near_d < v.near_d;
        if (u.far_d != v.far_d) return u.far_d > v.far_d;
        if (u.j != v.j) return u.j < v.j;
        return u.i < v.i;
      });
      {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "ordering near_eps=%.4g(ph %.3f) far_eps=%.4g(ph %.3f): "
                      "%zu lattice candidates",
                      sw[s1].eps.to_double(), sw[s1].phase.to_double(),
                      sw[s2].eps.to_double(), sw[s2].phase.to_double(),
                      cands.size());
        rep.notes.push_back(buf);
      }

      int64_t tried = 0;
      for (const Cand& cd : cands) {
        if (tried >= budget.max_candidates) break;
        ++tried;
        ++rep.candidates_tried;
        DyadicPoint z0{cx + Dyadic::scaled(cd.i, -l), Dyadic::scaled(cd.j, -l),
                       l};

        // cheap certified prescan of the near side before the full pipeline
        {
          DyadicOracle o1(sw[s1].c, Dyadic());
          CostMeter meter;
          int64_t pre = std::min<int64_t>(budget.dist_budget, 60000);
          DistanceBracket db = distance_estimate(z0, o1, meter, l + 5, pre);
          if (db.undecided || db.upper_infinite || db.upper > thr_near)
            continue;
        }

        DiscontinuityWitness w;
        w.z0 = z0;
        w.n = l;
        w.c1 = sw[s1].c;
        w.c2 = sw[s2].c;
        w.eps1 = sw[s1].eps;
        w.eps2 = sw[s2].eps;
        w.phase1 = sw[s1].phase;
        w.phase2 = sw[s2].phase;
        w.bracket1 = thr_near;                  // dist(z0, J_c1) <= 2^-(l+4)
        w.bracket2 = Dyadic::scaled(16, -l);    // certified set-free disk radius
        {
          Dyadic half =
              div_dir(Dyadic::scaled(1, -l), Dyadic(5), 40, Round::up);
          GridRegion reg1{w.z0.x - half, w.z0.x + half, w.z0.y - half,
                          w.z0.y + half};
          Dyadic hw2 = Dyadic::scaled(1, -(l - 4));
          GridRegion reg2{w.z0.x - hw2, w.z0.x + hw2, w.z0.y - hw2,
                          w.z0.y + hw2};
          w.render1 = RenderDescriptor{reg1, l + 4,
                                       DyadicOracle(w.c1, Dyadic()).descriptor()};
          w.render2 = RenderDescriptor{reg2, l + 4,
                                       DyadicOracle(w.c2, Dyadic()).descriptor()};
        }
        std::string why;
        if (!verify_witness(root, w, 0, 0, budget, &why)) {
          rep.notes.push_back("construction check failed: " + why);
          continue;
        }
        if (!verify_witness(root, w, 4, 2, budget, &why)) {
          rep.notes.push_back("re-verification failed: " + why);
          continue;
        }
        return w;
      }
    }
  }
  throw Error(Err::not_found,
              "no witness within budget; densest phase bin around " +
                  phase_str(rep.densest_phase) + " held " +
                  std::to_string(rep.densest_count) + " of " +
                  std::to_string(rep.eps_tried) + " sweep points");
}

}  // namespace jc
