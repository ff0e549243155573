// Certified location of real saddle-node (primitive parabolic) parameters of
// the quadratic family, via a double-precision prescan followed by a 2D
// interval Newton contraction on {f_c^p(z) - z = 0, (f_c^p)'(z) - 1 = 0}.
#pragma once

#include "num/interval.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace jc {

enum class PrimitiveEvidence { saddle_node_on_real_line, declared };
const char* primitive_evidence_name(PrimitiveEvidence e);

struct ParabolicRoot {
  RealInterval c;      // certified: the box c x alpha holds a unique solution
  int64_t period = 0;  // primitive period p of alpha
  RealInterval alpha;  // the parabolic periodic point (real slice)
  Dyadic multiplier_defect;  // certified upper bound on |(f^p)'(alpha) - 1|
  PrimitiveEvidence primitive_evidence =
      PrimitiveEvidence::saddle_node_on_real_line;
  int64_t bits = 0;        // log2 of the certified interval width bound
  int64_t ceiling = 10000; // refinement precision ceiling, in bits
};

// Unique tangent bifurcation of the given period inside the bracket.
// Errors: not_found when no saddle-node signature is detected or Newton does
// not contract; usage when the bracket holds more than one candidate.
ParabolicRoot find_parabolic_root(int64_t period, const RealInterval& bracket);

// Narrow both intervals to width <= 2^-bits and re-certify the invariants.
ParabolicRoot refine_root(const ParabolicRoot& root, int64_t bits);

// Provider suitable for IntervalOracle: refines the root on demand (cached).
std::function<RealInterval(int64_t)> root_refiner(const ParabolicRoot& root);

// Double-precision saddle-node parameter estimates of the given period in
// [lo, hi], one entry per detected root, sorted increasing. Certification is
// find_parabolic_root's job; estimates are only Newton-converged seeds.
std::vector<double> prescan_saddle_nodes(int64_t period, double lo, double hi,
                                         int64_t z_seeds = 160,
                                         int64_t c_seeds = 80);

// Certified orbit of alpha: f^i(alpha) for i = 0..period-1 over the root box.
std::vector<RealInterval> root_orbit(const ParabolicRoot& root);

}  // namespace jc
