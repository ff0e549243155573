// Pixel decisions in the oracle model. At resolution n the answer must be 1
// whenever dist(q, J_c) < 2^-n and 0 whenever dist(q, J_c) > 2*2^-n (max
// norm); in the band between, either answer is admissible. The provenance
// reports which side, if any, was actually certified.
#pragma once

#include "pixel/estimator.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace jc {

struct PixelQuery {
  DyadicPoint point;
  int64_t n;
  PixelQuery(const DyadicPoint& p, int64_t res) : point(p), n(res) {
    if (res < 1) throw Error(Err::usage, "pixel resolution must be >= 1");
    if (!p.x.on_grid(res) || !p.y.on_grid(res))
      throw Error(Err::usage, "pixel is not a size-n dyadic point");
  }
};

enum class Provenance { certified_far, certified_near, borderline };

const char* provenance_name(Provenance p);

// replayable summary of the certificate behind an answer
struct CertRecord {
  std::string method;      // far_field | koebe | cover_escaping | cover_bounded | pair | fallback
  Dyadic lower_inf;        // certified max-norm lower bound on dist(q, J_c)
  Dyadic upper_inf;        // certified max-norm upper bound (when upper_finite)
  bool upper_finite = false;
  int64_t oracle_m = 0;    // highest oracle precision queried (0 = none)
  Dyadic bx, by;           // certified bounded witness (pair certificates)
  Dyadic ex, ey;           // certified escaping witness (pair certificates)
};

struct PixelAnswer {
  int bit = 0;
  Provenance provenance = Provenance::borderline;
  CertRecord record;
};

// caches shared across many pixels against one oracle; answers do not depend
// on sharing, only the attribution of setup ticks does
struct DecideContext {
  std::map<int64_t, Ball> cballs;
  std::map<int64_t, TrapSet> traps;
  bool connected_known = false;
  bool connected_value = false;
};

struct DecideLimits {
  int64_t escape_cap = 0;   // orbit classification cap; 0 derives from n
  int64_t koebe_cap = 4096; // orbit push cap for the exterior bracket
  CoverBudget cover;        // per-cover subdivision budget
};

// the schedule shared by decide_pixel and callers that warm a DecideContext
inline int64_t decide_oracle_precision(int64_t n) { return n + 8; }
// deeper read used by pair-partner searches, whose witness enclosures must
// be much tighter than the pixel itself
inline int64_t decide_partner_precision(int64_t n) {
  return std::max<int64_t>(2 * n + 24, 48);
}
inline Precision decide_working_precision(int64_t n) {
  return Precision(n < 16 ? 96 : 64 + 2 * n);
}

PixelAnswer decide_pixel(const PixelQuery& q, OracleTape& oracle, CostMeter& meter,
                         DecideContext* ctx = nullptr,
                         const DecideLimits* limits = nullptr);

}  // namespace jc
