// Certified escape iteration for z^2 + c over complex balls.
#pragma once

#include "num/ball.hpp"
#include "oracle/oracle.hpp"

namespace jc {

enum class EscapeStatus { escaped, undecided };

struct EscapeResult {
  EscapeStatus status = EscapeStatus::undecided;
  int64_t steps = 0;          // first index whose iterate ball clears the radius
  RealInterval z_abs;         // |z_k| bracket at that index (escaped only)
};

// Certifies z is outside K_c by finding an iterate ball entirely beyond the
// escape radius max(2, |c| upper). Every orbit step charges one tick.
EscapeResult certify_escape(const Ball& z, const Ball& c, int64_t max_iter,
                            const Precision& prec, CostMeter& meter);

struct OrbitPush {
  bool reached = false;       // modulus target certified
  bool blew_up = false;       // radius overtook the center; enclosure useless
  int64_t steps = 0;
  Ball z;
  Ball dz;                    // d/dz of the iterate, tracked on request
  RealInterval z_abs;         // |z_k| bracket at stop
  RealInterval dz_abs;        // |dz_k| bracket at stop (when tracked)
};

// Iterates until the |z_k| lower bound reaches rho_target (or max_iter /
// blow-up). With track_derivative the chain rule dz <- 2 z dz runs alongside,
// dz_0 = 1. Charges one tick per step.
OrbitPush push_orbit(const Ball& z0, const Ball& c, const Dyadic& rho_target,
                     int64_t max_iter, const Precision& prec, CostMeter& meter,
                     bool track_derivative);

}  // namespace jc
