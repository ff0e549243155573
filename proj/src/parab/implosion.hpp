// Gate-transit measurements just above a saddle-node parameter: the critical
// orbit creeps through the channel left by the vanished periodic orbit, the
// number of period-steps spent inside a gate interval around alpha scales
// like epsilon^{-1/2}, and its fractional offset against the calibrated
// epsilon^{-1/2} lift serves as the measurable phase stand-in.
#pragma once

#include "num/ball.hpp"
#include "oracle/oracle.hpp"
#include "parab/roots.hpp"

#include <cstdint>
#include <memory>

namespace jc {

// gate centered at alpha, half-width one tenth of the distance from alpha to
// the nearest other marked real point (orbit mates; the critical point for
// period 1); dyadic endpoints so membership tests are exactly replayable
RealInterval default_gate(const ParabolicRoot& root);

struct TransitLimits {
  int64_t max_psteps = 400000;   // cap on period-steps before gate entry/exit
  int64_t max_bits = 4096;       // interval precision escalation ceiling
};

struct TransitResult {
  int64_t count = 0;       // period-steps certified inside the gate
  int64_t entry_step = 0;  // first period-step certified inside
  int64_t exit_step = 0;   // first period-step certified past the gate
  int64_t bits_used = 0;   // interval precision that resolved every test
};

// Certified count of f_{r+eps}^p steps the critical orbit spends inside the
// gate on its first passage. Errors: usage ("invalid epsilon") when the orbit
// escapes or wanders past the cap without entering the gate.
TransitResult gate_transit(const ParabolicRoot& root, const Dyadic& epsilon,
                           const RealInterval& gate,
                           const TransitLimits& lim = TransitLimits());

// Same measurement at an exact dyadic parameter c_param > r (the form the
// discontinuity-witness search emits); epsilon is taken relative to the
// certified root midpoint.
TransitResult gate_transit_at(const ParabolicRoot& root, const Dyadic& c_param,
                              const RealInterval& gate,
                              const TransitLimits& lim = TransitLimits());

// Affine fit transit ~ C * epsilon^{-1/2} + d over a geometric epsilon grid;
// the fitted lift turns raw counts into comparable fractional phases.
struct ImplosionCalibration {
  Dyadic C, d;
  Dyadic eps_hi, eps_lo;
  int64_t samples = 0;
  RealInterval gate = RealInterval(Dyadic());
};

ImplosionCalibration calibrate_phase(const ParabolicRoot& root,
                                     const RealInterval& gate,
                                     const Dyadic& eps_hi,
                                     const Dyadic& eps_lo, int64_t samples);

struct ImplosionSample {
  ParabolicRoot r;
  Dyadic epsilon;
  int64_t transit_count = 0;
  Dyadic phase_proxy;            // in [0, 1)
  int64_t tau_lift_proxy = 0;    // -transit_count, tends to -inf as eps -> 0
};

// Measures the sample at r + epsilon. When calib is null a fresh calibration
// over [epsilon*4, epsilon/4] with 9 samples is computed (deterministic).
ImplosionSample phase_proxy(const ParabolicRoot& root, const Dyadic& epsilon,
                            const RealInterval& gate,
                            const ImplosionCalibration* calib = nullptr);

// Sample at an exact dyadic parameter c_param > r.
ImplosionSample phase_proxy_at(const ParabolicRoot& root, const Dyadic& c_param,
                               const RealInterval& gate,
                               const ImplosionCalibration* calib = nullptr);

enum class LimitStatus { ok, escaped, undecided };

struct LimitIterate {
  Ball value;                 // certified enclosure after steps_done steps
  LimitStatus status = LimitStatus::ok;
  int64_t steps_done = 0;     // single f-steps actually taken
  int64_t steps_planned = 0;  // period * transit_count(epsilon)
};

// f_{r+eps}^{p*N(eps)} applied to z in certified ball arithmetic; stops early
// with status escaped once the modulus lower bound clears the escape radius,
// or undecided if the enclosure blows up at the precision ceiling.
LimitIterate geometric_limit_iterate(const ParabolicRoot& root,
                                     const Dyadic& epsilon, const Ball& z,
                                     const RealInterval& gate,
                                     int64_t working_bits = 256);

// Largest epsilon = 2^-k (k >= 2) below hint for which gate_transit succeeds;
// the empirical validity-window edge recorded with each experiment.
Dyadic discover_epsilon_ceiling(const ParabolicRoot& root,
                                const RealInterval& gate,
                                const Dyadic& hint = Dyadic::scaled(1, -2));

// Oracle for the non-dyadic parameter r + epsilon, backed by on-demand root
// refinement; descriptor records the period, epsilon, and connectedness when
// the parameter provably lies in the real connectedness window.
std::unique_ptr<IntervalOracle> perturbed_root_oracle(const ParabolicRoot& root,
                                                      const Dyadic& epsilon);

}  // namespace jc
