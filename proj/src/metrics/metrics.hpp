// One-sided and Hausdorff distances between finite dyadic point sets and
// between grid images, plus the empirical semi-continuity probe.
#pragma once

#include "pixel/grid.hpp"

#include <string>
#include <vector>

namespace jc {

// L1 here follows the convention that the "1-norm" of a point is the max of
// the coordinate magnitudes; it is exact in dyadic arithmetic. Euclid
// distances are certified brackets.
enum class Norm { L1, Euclid };

const char* norm_name(Norm n);

struct PointSet {
  std::vector<DyadicPoint> points;
  Norm ambient_norm = Norm::L1;
};

// max over a in A of min over b in B of |a - b|; exact for L1 (degenerate
// bracket), certified bracket for Euclid. Errors when either set is empty.
RealInterval one_sided_dist(const PointSet& A, const PointSet& B);
// reference quadratic scan; the bucketed version must agree exactly
RealInterval one_sided_dist_brute(const PointSet& A, const PointSet& B);
RealInterval hausdorff(const PointSet& A, const PointSet& B);

struct GridSets {
  PointSet J_proxy;    // In-cell centers 8-adjacent to a non-In cell
  PointSet K_proxy;    // In and Ambiguous centers
  PointSet Out_proxy;  // Out centers
};

GridSets grid_sets(const GridImage& img, Norm norm = Norm::L1);

struct SemicontinuityResult {
  Dyadic delta;                       // largest tested delta that fully passed
  bool found = false;                 // some delta passed
  int64_t renders = 0;
  std::vector<std::string> findings;  // violations seen at larger deltas
};

// Samples parameters within delta of the oracle's parameter (delta ladder
// descending from epsilon/4), renders grid proxies at resolution n, and
// checks the two one-sided inequalities dist(J_hat -> J_c) and
// dist(K_c -> K_hat) against epsilon with one grid pitch 2^-(n-1) of slack.
SemicontinuityResult semicontinuity_probe(OracleTape& c_hat, const Dyadic& epsilon,
                                          int64_t n, int64_t trials, uint64_t seed);

}  // namespace jc
