// Certified distance brackets for dist(z, J_c): exterior brackets from the
// Green's function (distance-estimator) when K_c is certifiably connected,
// plus universally valid escape covers, invariant-region traps, and
// bounded/escaping pair certificates.
#pragma once

#include "oracle/oracle.hpp"
#include "pixel/escape.hpp"

#include <optional>
#include <vector>

namespace jc {

struct DistanceBracket {
  Dyadic lower;                 // certified dist >= lower (Euclidean)
  Dyadic upper;                 // certified dist <= upper when finite
  bool upper_infinite = true;
  bool undecided = false;       // budget ran out before the width goal
};

// disk D(w, r) with f_c^period(D) certified inside D; every point is in K_c
struct DiskTrap {
  Dyadic wx, wy, r;
  int64_t period = 1;
};

// axis-aligned rectangle with f_c(R) certified inside R
struct RectTrap {
  RealInterval x, y;
};

// Disk D(w, r) certified to contain at least one point of K_c for EVERY
// parameter in the oracle ball (a periodic point or one of its preimages).
// Unlike a trap, membership of the whole disk is not claimed.
struct KPointWitness {
  Dyadic wx, wy, r;
};

struct TrapSet {
  std::vector<DiskTrap> disks;
  std::vector<RectTrap> rects;
  std::vector<KPointWitness> witnesses;
};

// Builds traps valid for every parameter in the ball `c`. When the oracle
// descriptor reveals an exact dyadic parameter the ball may be exact, which
// admits thin traps (e.g. the invariant segment at c = -2).
TrapSet find_traps(const Ball& c, const Precision& prec, CostMeter& meter);

// exact containment of a ball in some trap
bool ball_in_traps(const Ball& b, const TrapSet& traps, const Precision& prec);

struct BoundedCert {
  bool bounded = false;
  int64_t steps = 0;
};

// Certifies the whole ball lies in K_c by iterating it into a trap.
BoundedCert certify_bounded(const Ball& pt, const Ball& c, const TrapSet& traps,
                            int64_t max_iter, const Precision& prec, CostMeter& meter);

enum class RegionShape { max_square, euclid_disk };
enum class RegionVerdict { all_escaping, all_bounded, mixed_pair, unresolved };

struct CoverBudget {
  int64_t max_cells = 4096;
  int64_t iter_cap = 512;
  int64_t max_depth = 12;       // subdivisions below the region scale
  int64_t tick_cap = 0;         // abort unresolved past this many ticks; 0 = off
};

struct CoverOutcome {
  RegionVerdict verdict = RegionVerdict::unresolved;
  bool has_pair = false;        // certified escaping + bounded points found
  bool cell_capped = false;     // unresolved because max_cells ran out
  bool tick_capped = false;     // unresolved because tick_cap ran out
  Dyadic esc_x, esc_y;          // certified escaping point (when seen)
  Dyadic bnd_x, bnd_y;          // certified bounded point (when seen)
  int64_t cells_used = 0;
};

// Adaptive cover of the closed square {max-norm <= t} or disk {|.| <= t}
// around (cx, cy): every cell certified escaping => region misses K_c;
// every cell certified bounded => region inside K_c; one of each => J_c
// crosses the region (pair certificate). Unresolved otherwise.
CoverOutcome cover_region(const Dyadic& cx, const Dyadic& cy, const Dyadic& t,
                          RegionShape shape, const Ball& c, const TrapSet& traps,
                          const CoverBudget& budget, const Precision& prec,
                          CostMeter& meter);

// True when every real in [lo, hi] has a connected filled Julia set: the
// real connectedness window [-2, 1/4].
bool real_window_connected(const RealInterval& c_re);
// Connectedness certificate for the oracle's parameter, from descriptor
// attestations or from the ball lying in |c| <= 1/4.
bool connectedness_certified(const OracleDescriptor& d, const Ball& c);

// Two-sided exterior bracket from the Green's function G and its gradient:
// with W = e^G and g = |grad G|, dist >= (W-1)/(4Wg) by the Koebe 1/4
// theorem applied to the inverse uniformizer on the disk of radius W-1, and
// dist <= (W^2-1)/(Wg) by Schwarz-Pick. Requires K_c connected; returns
// nullopt when the orbit fails to escape cleanly within iter_cap.
std::optional<std::pair<Dyadic, Dyadic>> exterior_bracket(
    const Ball& z, const Ball& c, int64_t iter_cap, const Precision& prec,
    CostMeter& meter);

// bounded-side partner for a pair certificate: some point of K_c lies
// within `slack` of (bx, by); slack is zero for trap points
struct BoundedPartner {
  Dyadic bx, by, slack;
};

// Picks the bounded partner minimizing dist + slack among trap points and
// K-point witnesses, admissible when that score is <= t; nullopt otherwise.
std::optional<BoundedPartner> bounded_candidate_near(
    const Dyadic& zx, const Dyadic& zy, const Dyadic& t, const TrapSet& traps,
    const Precision& prec, CostMeter& meter);

// Searches a compass of points within Euclidean distance t of (zx, zy) for
// one that certifiably escapes; outer radii are preferred so the resulting
// upper bound is as tight as the caller's t.
std::optional<std::pair<Dyadic, Dyadic>> escaping_candidate_near(
    const Dyadic& zx, const Dyadic& zy, const Dyadic& t, const Ball& c,
    const TrapSet& traps, int64_t iter_cap, const Precision& prec,
    CostMeter& meter);

// Certified Euclidean bracket of dist(z, J_c), refined by bisection with
// escape/trap covers until width <= 2^-target_n or the tick budget is spent.
DistanceBracket distance_estimate(const DyadicPoint& z, OracleTape& oracle,
                                  CostMeter& meter, int64_t target_n,
                                  int64_t budget);

}  // namespace jc
