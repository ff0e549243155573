// The player-vs-machines fooling game at finite depth: each depth runs one
// roster machine on a freshly constructed discontinuity-witness pixel with
// the parameter oracle pinned to the current parabolic root's interval, then
// commits the parameter toward the branch that falsifies (or outlasts) the
// machine's answer and emits a replayable certificate.
#pragma once

#include "adv/machines.hpp"
#include "parab/roots.hpp"
#include "parab/witness.hpp"

#include <string>
#include <vector>

namespace jc {

enum class ViolatedSide { answered_zero_but_near, answered_one_but_far, timed_out };
const char* violated_side_name(ViolatedSide v);

struct Certificate {
  int64_t depth = 0;  // 1-based index of the game step that emitted it
  int64_t machine_id = -1;
  std::string machine_name;
  std::string budget_desc;
  int64_t l = 0;
  DyadicPoint p{Dyadic(), Dyadic(), 0};
  int answer = -1;  // machine's bit; -1 when it timed out
  ViolatedSide violated_side = ViolatedSide::timed_out;
  int branch = 0;      // chosen branch s+1: 1 = J-near parameter, 2 = far
  Dyadic c_used;       // the committed branch parameter c_n (exact dyadic)
  // certified bracket for dist(p, J at c_used); for far-branch certificates
  // only the lower side is certified (upper_finite = false)
  RealInterval evidence{Dyadic(), Dyadic()};
  bool evidence_upper_finite = false;
  std::vector<TranscriptEntry> transcript;  // oracle answers served to the machine
  uint64_t ticks = 0;
  uint64_t budget = 0;
  uint64_t max_m_queried = 0;
  int64_t verified_at_precision = 0;  // max oracle bits used by evidence checks
  // condition-(1) slack split between rendering error and parameter drift
  Dyadic render_budget, drift_budget;
};

struct DepthRecord {
  int64_t depth = 0;  // 1-based
  int64_t l = 0;
  int64_t machine_id = -1;
  std::string machine_name;
  DyadicPoint pixel{Dyadic(), Dyadic(), 0};
  int answer = -1;  // -1 = timeout
  int branch = 0;
  RealInterval interval{Dyadic(), Dyadic()};  // commitment after this depth
  Dyadic mid_step;                            // |mid_k - mid_{k-1}|
  uint64_t ticks = 0, budget = 0, max_m_queried = 0;
  // step-size bounds (condition 3 and the budget-drift analog), raw exponent
  // per the construction and the desk-scale applied exponent actually checked
  int64_t cond3_raw_exp = 0, cond3_applied_exp = 0;
  int64_t drift_raw_exp = 0, drift_applied_exp = 0;
  bool step_ok = false;
  // condition-2 grid-proxy distances between consecutive midpoints
  int64_t cond2_raw_exp = 0, cond2_applied_exp = 0;
  Dyadic cond2_j, cond2_k;  // measured one-sided distances (L1, exact)
  bool cond2_ok = false;
  int64_t root_period = 0;  // fresh root located for the next depth (0 = none)
  RealInterval root_interval{Dyadic(), Dyadic()};
  int64_t cert_ref = -1;  // index into certificates
};

struct GameConfig {
  int64_t max_depth = 3;
  int64_t l_start = 12;  // depth k plays at l = l_start + (k-1)*l_stride
  int64_t l_stride = 1;
  std::string budget_desc = "16*l";  // echoed in reports; rosters carry their own
  int64_t base_period = 3;           // saddle-node the game opens at
  RealInterval base_bracket{Dyadic(-2), Dyadic(0)};
  // hard precision ceilings for the desk-scale step and proximity checks;
  // raw construction exponents are recorded alongside the applied ones
  int64_t step_ceiling = 7;   // caps 3*l_n and T(l_n) step-bound exponents
  int64_t cond2_ceiling = 4;  // caps the 3*l condition-2 exponent
  int64_t cond2_grid_n = 6;   // render pitch 2^-n for the grid proxies
  GridRegion cond2_window{Dyadic::scaled(-13, -6), Dyadic::scaled(6, -6),
                          Dyadic(), Dyadic::scaled(8, -6)};
  WitnessBudget witness;
  uint64_t seed = 0x6a63u;  // recorded in reports; the game itself is deterministic
};

struct GameState {
  GameConfig cfg;
  int64_t depth = 0;
  RealInterval c_interval{Dyadic(), Dyadic()};        // current commitment
  std::vector<RealInterval> commitments;              // I_0 .. I_depth
  ParabolicRoot root;                                 // root inside c_interval
  Dyadic rhat;                                        // grid anchor of the base root
  std::vector<DepthRecord> history;
  std::vector<Certificate> certificates;
  std::vector<TranscriptEntry> served;  // all oracle answers served to machines
  bool verified = false;                // every certificate re-verified at the end
  std::vector<std::string> notes;
  // render cache for condition-2 checks (parameter key -> proxies); never
  // serialized, purely a recomputation saver
  std::vector<std::pair<std::string, GridSets>> proxy_cache;
};

// Certified base state: locates the opening saddle-node root, commits the
// initial interval around it, and verifies the witness-band containment.
GameState init_game(const GameConfig& cfg);

// One induction step: finds a witness at the next l, runs the machine with
// the oracle pinned to the current root interval, commits toward the
// falsifying branch (timeout: the branch nearest the current midpoint),
// locates a fresh saddle-node root inside the new commitment (except after
// the final depth), verifies conditions (2) and (3) at grid scale, and
// appends a certificate. Errors: not_found (witness or root), ceiling (a
// desk-scale guard failed; diagnostics in the message).
void player_step(GameState& state, const MachineSpec& machine);

// Full game: init + one step per roster machine up to max_depth, then every
// certificate independently re-verified at 4x oracle precision. Errors from
// player_step are recorded in notes and the partial state is returned.
GameState run_game(const std::vector<MachineSpec>& roster, const GameConfig& cfg);

// Replays the certificate against the final committed interval: re-runs the
// machine on the recorded transcript (answer and tick invariance), checks
// every served answer's guarantee band against the final interval, re-makes
// the evidence bracket from scratch at 2^extra_bits times the oracle
// precision, checks the condition-(1) thresholds (2^-l/2 near, 3*2^-l far),
// and re-checks the condition-(2)/(3) slack between the certificate's
// parameter and the final midpoint at grid scale. False with a reason on any
// failure.
bool verify_certificate(const Certificate& cert, GameState& state,
                        std::string* why = nullptr, int64_t extra_bits = 1);

}  // namespace jc
