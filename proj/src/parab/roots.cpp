#include "parab/roots.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace jc {

const char* primitive_evidence_name(PrimitiveEvidence e) {
  switch (e) {
    case PrimitiveEvidence::saddle_node_on_real_line:
      return "saddle_node_on_real_line";
    case PrimitiveEvidence::declared:
      return "declared";
  }
  return "?";
}

namespace {

// ---------------------------------------------------------------------------
// double-precision jets for the prescan

struct DJet {
  double v, dz, dc, dzz, dzc;
};

DJet djet(double z, double c, int64_t p) {
  DJet j{z, 1.0, 0.0, 0.0, 0.0};
  for (int64_t i = 0; i < p; ++i) {
    double v = j.v;
    DJet n;
    n.v = v * v + c;
    n.dz = 2 * v * j.dz;
    n.dc = 2 * v * j.dc + 1;
    n.dzz = 2 * (j.dz * j.dz + v * j.dzz);
    n.dzc = 2 * (j.dz * j.dc + v * j.dzc);
    j = n;
  }
  return j;
}

double forbit(double z, double c, int64_t steps) {
  for (int64_t i = 0; i < steps; ++i) z = z * z + c;
  return z;
}

struct Candidate {
  double c = 0;
  std::vector<double> zs;  // distinct orbit representatives found
};

// damped 2D Newton on (f^p(z)-z, (f^p)'(z)-1) in the unknowns (z, c)
bool newton2d_double(double& z, double& c, int64_t p) {
  for (int it = 0; it < 80; ++it) {
    if (!std::isfinite(z) || !std::isfinite(c)) return false;
    if (std::abs(z) > 4 || std::abs(c) > 4) return false;
    DJet j = djet(z, c, p);
    double f1 = j.v - z, f2 = j.dz - 1;
    if (std::abs(f1) < 1e-13 && std::abs(f2) < 1e-13) return true;
    double j00 = j.dz - 1, j01 = j.dc, j10 = j.dzz, j11 = j.dzc;
    double det = j00 * j11 - j01 * j10;
    if (!std::isfinite(det) || std::abs(det) < 1e-30) return false;
    double dz = (-f1 * j11 + f2 * j01) / det;
    double dc = (f1 * j10 - f2 * j00) / det;
    double clamp = std::max(std::abs(dz), std::abs(dc)) / 0.25;
    if (clamp > 1) {
      dz /= clamp;
      dc /= clamp;
    }
    z += dz;
    c += dc;
  }
  return false;
}

// reject solutions whose orbit has a period strictly dividing p
bool primitive_period_double(double z, double c, int64_t p) {
  for (int64_t d = 1; d < p; ++d) {
    if (p % d != 0) continue;
    if (std::abs(forbit(z, c, d) - z) < 1e-3) return false;
  }
  return true;
}

std::vector<Candidate> prescan(int64_t period, double lo, double hi,
                               int64_t z_seeds, int64_t c_seeds) {
  std::vector<Candidate> clusters;
  for (int64_t ic = 0; ic < c_seeds; ++ic) {
    double c0 = lo + (hi - lo) * (ic + 0.5) / c_seeds;
    for (int64_t iz = 0; iz < z_seeds; ++iz) {
      double z = -2.0 + 4.0 * (iz + 0.5) / z_seeds;
      double zc = z, cc = c0;
      if (!newton2d_double(zc, cc, period)) continue;
      if (cc < lo || cc > hi) continue;
      if (!primitive_period_double(zc, cc, period)) continue;
      bool placed = false;
      for (auto& cl : clusters) {
        if (std::abs(cl.c - cc) < 1e-7) {
          bool dup = false;
          for (double w : cl.zs)
            if (std::abs(w - zc) < 1e-5) dup = true;
          if (!dup) cl.zs.push_back(zc);
          placed = true;
          break;
        }
      }
      if (!placed) clusters.push_back(Candidate{cc, {zc}});
    }
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const Candidate& a, const Candidate& b) { return a.c < b.c; });
  return clusters;
}

// ---------------------------------------------------------------------------
// interval jets and the certified Newton operator

struct IJet {
  RealInterval v, dz, dc, dzz, dzc;
};

IJet ijet(const RealInterval& z, const RealInterval& c, int64_t p, int64_t wb) {
  IJet j{z, RealInterval(Dyadic(1)), RealInterval(), RealInterval(),
         RealInterval()};
  RealInterval one(Dyadic(1)), two(Dyadic(2));
  for (int64_t i = 0; i < p; ++i) {
    RealInterval v = j.v;
    IJet n;
    n.v = (v.sqr() + c).rounded(wb);
    n.dz = (two * v * j.dz).rounded(wb);
    n.dc = (two * v * j.dc + one).rounded(wb);
    n.dzz = ((j.dz.sqr() + v * j.dzz).mul_pow2(1)).rounded(wb);
    n.dzc = ((j.dz * j.dc + v * j.dzc).mul_pow2(1)).rounded(wb);
    j = n;
  }
  return j;
}

enum class StepOutcome { contracted, moore, no_root, stuck };

// one interval Newton step on the box Z x C; moore means N(B) landed in the
// interior of B, which certifies existence and uniqueness of a root in B
StepOutcome newton_step(RealInterval& Z, RealInterval& C, int64_t p,
                        int64_t wb) {
  RealInterval mz(Z.mid()), mc(C.mid());
  IJet fm = ijet(mz, mc, p, wb + 16);
  RealInterval f1 = fm.v - mz;
  RealInterval f2 = fm.dz - RealInterval(Dyadic(1));
  IJet jb = ijet(Z, C, p, wb);
  RealInterval j00 = jb.dz - RealInterval(Dyadic(1));
  RealInterval j01 = jb.dc, j10 = jb.dzz, j11 = jb.dzc;
  RealInterval det = (j00 * j11 - j01 * j10).rounded(wb);
  if (det.contains_zero()) return StepOutcome::stuck;
  RealInterval nz = mz + idiv(-(f1 * j11) + f2 * j01, det, wb);
  RealInterval nc = mc + idiv(f1 * j10 - f2 * j00, det, wb);
  bool moore = Z.contains_interior(nz) && C.contains_interior(nc);
  if (Z.disjoint(nz) || C.disjoint(nc)) return StepOutcome::no_root;
  RealInterval z2 = Z.intersect(nz), c2 = C.intersect(nc);
  bool narrowed = z2.width() < Z.width() || c2.width() < C.width();
  Z = z2;
  C = c2;
  if (moore) return StepOutcome::moore;
  return narrowed ? StepOutcome::contracted : StepOutcome::stuck;
}

struct CertifiedBox {
  RealInterval Z, C;
};

// contract until both widths are <= 2^-bits; requires a Moore success first
bool contract_box(RealInterval& Z, RealInterval& C, int64_t p, int64_t bits,
                  bool& moore_seen) {
  int64_t wb = bits + 64;
  Dyadic target = Dyadic::scaled(1, -bits);
  for (int it = 0; it < 200; ++it) {
    if (moore_seen && Z.width() <= target && C.width() <= target) return true;
    StepOutcome so = newton_step(Z, C, p, wb);
    if (so == StepOutcome::no_root) return false;
    if (so == StepOutcome::moore) moore_seen = true;
    if (so == StepOutcome::stuck && !moore_seen) return false;
    if (so == StepOutcome::stuck && moore_seen &&
        (Z.width() > target || C.width() > target))
      wb *= 2;  // stalled above target: retry the step with more headroom
    if (wb > 64 * (bits + 64)) return false;
  }
  return moore_seen && Z.width() <= target && C.width() <= target;
}

Dyadic snap(double v) {
  return Dyadic::scaled((long)std::llround(v * (double)(1LL << 40)), -40);
}

void check_residuals(const RealInterval& Z, const RealInterval& C, int64_t p,
                     Dyadic& defect) {
  IJet j = ijet(Z, C, p, 192);
  Dyadic res1 = (j.v - Z).abs().hi();
  Dyadic res2 = (j.dz - RealInterval(Dyadic(1))).abs().hi();
  Dyadic bound = Dyadic::scaled(1, -20);
  if (res1 > bound || res2 > bound)
    throw Error(Err::internal, "root residuals exceed the certified bound");
  defect = res2;
}

void check_primitivity(const RealInterval& Z, const RealInterval& C,
                       int64_t p) {
  for (int64_t d = 1; d < p; ++d) {
    if (p % d != 0) continue;
    RealInterval ret = ijet(Z, C, d, 192).v - Z;
    if (ret.contains_zero())
      throw Error(Err::not_found,
                  "candidate orbit is not of primitive period " +
                      std::to_string(p));
  }
  if (p % 2 == 0) {
    // a period-doubling (satellite) point would carry half-multiplier -1
    RealInterval mu = ijet(Z, C, p / 2, 192).dz;
    if (mu.contains(Dyadic(-1)))
      throw Error(Err::not_found,
                  "satellite (doubling) bifurcation rejected: half-period "
                  "multiplier brackets -1");
  }
}

}  // namespace

ParabolicRoot find_parabolic_root(int64_t period, const RealInterval& bracket) {
  if (period < 1) throw Error(Err::usage, "period must be >= 1");
  if (!(bracket.lo() < bracket.hi()))
    throw Error(Err::usage, "bracket must have positive width");
  double lo = bracket.lo().to_double(), hi = bracket.hi().to_double();
  std::vector<Candidate> cands = prescan(period, lo, hi, 160, 80);
  if (cands.empty())
    throw Error(Err::not_found,
                "no saddle-node of period " + std::to_string(period) +
                    " detected in the bracket");
  if (cands.size() > 1)
    throw Error(Err::usage,
                "ambiguous bracket: " + std::to_string(cands.size()) +
                    " tangent bifurcations of period " +
                    std::to_string(period) + " detected");
  const Candidate& cand = cands.front();
  // deterministic representative: the orbit point closest to the critical
  // point, which is the one whose petal the critical orbit enters
  double a0 = cand.zs.front();
  for (double z : cand.zs)
    if (std::abs(z) < std::abs(a0)) a0 = z;

  Dyadic zc = snap(a0), cc = snap(cand.c);
  for (int attempt = 0; attempt < 4; ++attempt) {
    Dyadic hw = Dyadic::scaled(1, -14 - 4 * attempt);
    RealInterval Z(zc - hw, zc + hw);
    Dyadic clo = max(cc - hw, bracket.lo()), chi = min(cc + hw, bracket.hi());
    if (!(clo < chi)) continue;
    RealInterval C(clo, chi);
    bool moore = false;
    if (!contract_box(Z, C, period, 52, moore) || !moore) continue;
    check_primitivity(Z, C, period);
    ParabolicRoot root;
    root.c = C;
    root.period = period;
    root.alpha = Z;
    root.primitive_evidence = PrimitiveEvidence::saddle_node_on_real_line;
    root.bits = 52;
    check_residuals(Z, C, period, root.multiplier_defect);
    return root;
  }
  throw Error(Err::not_found,
              "interval Newton did not contract near the candidate at c ~ " +
                  std::to_string(cand.c));
}

ParabolicRoot refine_root(const ParabolicRoot& root, int64_t bits) {
  if (bits < 1) throw Error(Err::usage, "bits must be >= 1");
  if (bits > root.ceiling)
    throw Error(Err::ceiling, "refinement to " + std::to_string(bits) +
                                  " bits exceeds the ceiling of " +
                                  std::to_string(root.ceiling));
  Dyadic target = Dyadic::scaled(1, -bits);
  if (root.c.width() <= target && root.alpha.width() <= target) return root;
  RealInterval Z = root.alpha, C = root.c;
  bool moore = true;  // uniqueness was certified at construction
  if (!contract_box(Z, C, root.period, bits, moore))
    throw Error(Err::internal, "refinement lost the Newton contraction");
  ParabolicRoot out = root;
  out.c = C;
  out.alpha = Z;
  out.bits = std::max(root.bits, bits);
  check_residuals(Z, C, root.period, out.multiplier_defect);
  return out;
}

std::function<RealInterval(int64_t)> root_refiner(const ParabolicRoot& root) {
  auto state = std::make_shared<ParabolicRoot>(root);
  return [state](int64_t bits) -> RealInterval {
    int64_t need = std::max<int64_t>(bits, 8);
    if (state->c.width() > Dyadic::scaled(1, -need))
      *state = refine_root(*state, need);
    return state->c;
  };
}

std::vector<double> prescan_saddle_nodes(int64_t period, double lo, double hi,
                                         int64_t z_seeds, int64_t c_seeds) {
  std::vector<double> out;
  for (const Candidate& c : prescan(period, lo, hi, z_seeds, c_seeds))
    out.push_back(c.c);
  return out;
}

std::vector<RealInterval> root_orbit(const ParabolicRoot& root) {
  std::vector<RealInterval> orbit;
  RealInterval z = root.alpha;
  for (int64_t i = 0; i < root.period; ++i) {
    orbit.push_back(z);
    z = (z.sqr() + root.c).rounded(192);
  }
  return orbit;
}

}  // namespace jc
