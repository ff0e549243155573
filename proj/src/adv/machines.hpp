// Candidate pixel-decision machines: pluggable procedures that answer whether
// a pixel is near the Julia set using only oracle access to the parameter,
// every compute step and oracle bit charged to a meter, run under tick
// budgets with preemptive timeout.
#pragma once

#include "oracle/oracle.hpp"
#include "pixel/grid.hpp"

#include <functional>
#include <string>
#include <vector>

namespace jc {

// ask: is dist(p, J_c) small at scale 2^-n? (the rendering question a
// machine must answer: 1 forced when dist < 2^-n, 0 forced when > 2*2^-n)
struct PixelQuery {
  DyadicPoint p;
  int64_t n = 0;
};

// returns the answer bit; all work is charged to the meter, oracle reads via
// the tape (which logs a transcript); may throw ceiling when preempted
using MachineProc = std::function<int(const PixelQuery&, OracleTape&, CostMeter&)>;

struct MachineSpec {
  int64_t id = 0;      // roster index
  std::string name;    // registry key: const0 | const1 | est | est_cert | escape
  std::string budget_desc;  // budget family, e.g. "16*l" or "l*l"
  MachineProc proc;
  std::function<uint64_t(int64_t)> budget_T;  // monotone tick budget per scale l
};

struct MachineOutcome {
  int64_t machine_id = -1;
  std::string machine_name;
  int answer = -1;  // 0/1; -1 when timed out
  bool timed_out = false;
  uint64_t ticks = 0;
  uint64_t budget = 0;
  uint64_t max_m_queried = 0;
  std::vector<TranscriptEntry> transcript;
};

// Runs the machine on one pixel with the tick limit budget_T(q.n). A budget
// overrun preempts the procedure and is recorded as a timeout (the machine
// failed to answer within its budget; ticks then include the overrunning
// charge). For answered runs, max_m_queried <= ticks <= budget holds, so the
// machine cannot have distinguished parameters that agree to its budget in
// bits. The oracle transcript is cleared first; the log of served answers is
// returned in the outcome.
MachineOutcome run_machine(const MachineSpec& m, const PixelQuery& q, OracleTape& oracle);

// Budget families: products of integer literals and `l`, e.g. "16*l", "l*l",
// "50*l", "l*l*4", or a plain integer. Errors on anything else.
std::function<uint64_t(int64_t)> parse_budget(const std::string& desc);

// roster builders; id is the caller-assigned roster index
MachineSpec make_machine(int64_t id, const std::string& name,
                         const std::string& budget_desc);
// const0 | const1: answer a fixed bit in one tick, no oracle reads.
// est:      budgeted distance estimator; coarse-first oracle ladder (8, 16,
//           32, 64 bits), shadow-orbit iteration with escape-time Milnor
//           estimates and a bounded-orbit trend bail; always halts on its own
//           within the ladder, deterministic ticks.
// est_cert: certified distance estimator: answers only when a certified
//           bracket clears a band; escalates precision forever otherwise, so
//           on band-straddling pixels it times out at any finite budget.
// escape:   plain escape-time thresholding at fixed iteration caps.
std::vector<MachineSpec> make_roster(const std::vector<std::string>& names,
                                     const std::string& budget_desc);
std::vector<MachineSpec> demo_roster(const std::string& budget_desc = "16*l");

// Worst-case ticks of the machine over size-n dyadic points in the closed
// ball of radius 2C around the origin, with the oracle fixed to the dyadic
// parameter c and no tick limit (the machine's own internal caps bound the
// run). Exhaustive for n <= exhaustive_limit, deterministic sample above
// (flagged in the result); the sample grid depends only on (n, C, seed), so
// equal-seed measurements at different parameters visit the same points.
TickMeasurement measure_machine_T(const MachineSpec& m, int64_t n, int64_t C,
                                  const Dyadic& c_re, const Dyadic& c_im,
                                  int64_t exhaustive_limit = 8,
                                  int64_t sample_count = 20000,
                                  uint64_t seed = 0x6a633131u);

}  // namespace jc
