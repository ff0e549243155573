// Search for pixels that expose the discontinuity of the Julia set just above
// a saddle-node parameter: a point certified within 2^-l of J at one nearby
// parameter and certified inside the escape set, with an 8*2^-l clearance,
// at another nearby parameter with a different implosion phase.
#pragma once

#include "metrics/metrics.hpp"
#include "parab/implosion.hpp"
#include "pixel/grid.hpp"

#include <string>
#include <vector>

namespace jc {

struct WitnessBudget {
  int64_t eps_count = 48;        // phase-sweep size; 0 means nothing is tried
  int64_t max_pairs = 6;         // phase pairs examined (each in both roles)
  int64_t max_candidates = 24;   // pixel candidates certified per ordering
  int64_t cover_cells = 20000;   // escape-cover cell budget per candidate
  int64_t cover_ticks = 4000000; // escape-cover tick budget per candidate
  int64_t dist_budget = 300000;  // distance-estimate tick budget per candidate
};

// replayable description of a certified render
struct RenderDescriptor {
  GridRegion region;
  int64_t n = 0;
  OracleDescriptor oracle;
};

struct DiscontinuityWitness {
  DyadicPoint z0{Dyadic(), Dyadic(), 0};
  int64_t n = 0;      // pixel size l of the witness claims
  Dyadic c1, c2;      // exact dyadic parameters, both strictly above the root
  Dyadic bracket1;    // certified upper bound on dist(z0, J at c1), Euclidean
  Dyadic bracket2;    // radius of the disk certified free of K at c2
  Dyadic eps1, eps2;  // offsets of c1, c2 above the certified root midpoint
  Dyadic phase1, phase2;  // implosion phase proxies of the two parameters
  RenderDescriptor render1, render2;
};

struct WitnessSearchReport {
  int64_t eps_tried = 0;
  int64_t pairs_tried = 0;
  int64_t candidates_tried = 0;
  Dyadic densest_phase;       // center of the most-populated phase bin
  int64_t densest_count = 0;
  std::vector<std::string> notes;
};

// The three certified checks behind a witness, rerun from scratch:
//   near:  dist(z0, J at c1) <= 2^-(n+4), via an escaping/bounded pair;
//   far:   the Euclidean disk of radius 8*2^-n around z0 is covered by cells
//          whose orbits are certified to escape at c2;
//   proxy: a patch render at c1 puts a boundary-proxy cell within 2^-n/10.
// extra_n stiffens the checking resolution (re-verification passes 4) and
// extra_m adds oracle precision bits on top of the schedule.
bool verify_witness(const ParabolicRoot& root, const DiscontinuityWitness& w,
                    int64_t extra_n, int64_t extra_m,
                    const WitnessBudget& budget = WitnessBudget(),
                    std::string* why = nullptr);

// Sweeps phases on a geometric epsilon grid, pairs up distinct-phase
// parameters, and certifies the first candidate pixel that passes both the
// construction checks and the re-verification at resolution l+4 with extra
// oracle precision. Throws not_found with a phase-density summary when the
// budget is exhausted; usage for the excluded root 1/4 or l < 6.
DiscontinuityWitness find_discontinuity_witness(
    const ParabolicRoot& root, int64_t l,
    const WitnessBudget& budget = WitnessBudget(),
    WitnessSearchReport* report = nullptr);

}  // namespace jc
