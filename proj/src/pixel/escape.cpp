#include "pixel/escape.hpp"

namespace jc {

namespace {

// |z| > max(2, |c|) implies |z^2+c| >= |z|^2 - |c| > |z|, strictly increasing
// thereafter, so one cleared iterate certifies escape.
Dyadic escape_radius(const Ball& c, const Precision& prec) {
  Dyadic two(2);
  if (c.is_whole_plane()) throw Error(Err::usage, "parameter ball is unbounded");
  Dyadic cu = c.abs_bracket(prec.working_bits).hi();
  return max(two, cu);
}

}  // namespace

EscapeResult certify_escape(const Ball& z, const Ball& c, int64_t max_iter,
                            const Precision& prec, CostMeter& meter) {
  EscapeResult res;
  Dyadic r_esc = escape_radius(c, prec);
  Ball cur = z;
  for (int64_t k = 0; k <= max_iter; ++k) {
    if (cur.is_whole_plane()) return res;
    RealInterval za = cur.abs_bracket(prec.working_bits);
    if (za.lo() > r_esc) {
      res.status = EscapeStatus::escaped;
      res.steps = k;
      res.z_abs = za;
      return res;
    }
    // once the radius overtakes the center past the escape radius it stays
    // ahead of it; the modulus lower bound can never clear the threshold
    if (k > 0 && za.lo().is_zero() && cur.rad() > r_esc.mul_pow2(2)) return res;
    // orbit crushed toward the origin: certifying escape from here would need
    // far more iterations than any caller budgets, decline early
    if (k > 0 && za.hi() < Dyadic::scaled(1, -48)) return res;
    if (k == max_iter) break;
    meter.charge(1);
    cur = ball_step(cur, c, prec);
  }
  return res;
}

OrbitPush push_orbit(const Ball& z0, const Ball& c, const Dyadic& rho_target,
                     int64_t max_iter, const Precision& prec, CostMeter& meter,
                     bool track_derivative) {
  OrbitPush out;
  out.z = z0;
  out.dz = Ball(Dyadic(1), Dyadic());
  for (int64_t k = 0; k <= max_iter; ++k) {
    if (out.z.is_whole_plane()) {
      out.blew_up = true;
      out.steps = k;
      return out;
    }
    RealInterval za = out.z.abs_bracket(prec.working_bits);
    if (za.lo() >= rho_target) {
      out.reached = true;
      out.steps = k;
      out.z_abs = za;
      if (track_derivative) out.dz_abs = out.dz.abs_bracket(prec.working_bits);
      return out;
    }
    // enclosure with radius past the center can never certify anything again
    if (!out.z.rad().is_zero() && za.lo().is_zero() && k > 0 &&
        out.z.rad() > Dyadic(8)) {
      out.blew_up = true;
      out.steps = k;
      return out;
    }
    // orbit collapsing toward a superattracting interior point: reaching any
    // escape threshold is hopeless, stop burning iterations
    if (k > 0 && za.hi() < Dyadic::scaled(1, -48)) {
      out.steps = k;
      return out;
    }
    if (k == max_iter) break;
    meter.charge(1);
    if (track_derivative) {
      Ball two_z = ball_add(out.z, out.z, prec);
      out.dz = ball_mul(two_z, out.dz, prec);
    }
    out.z = ball_step(out.z, c, prec);
  }
  out.steps = max_iter;
  return out;
}

}  // namespace jc
