#include "parab/implosion.hpp"

#include <cmath>

namespace jc {

namespace {

ParabolicRoot ensure_bits(const ParabolicRoot& root, int64_t bits) {
  if (root.c.width() <= Dyadic::scaled(1, -bits)) return root;
  return refine_root(root, bits);
}

Dyadic escape_bar(const RealInterval& C) {
  // real orbits with x > max(2, |c|) grow monotonically; margin of 1/2
  return max(Dyadic::scaled(5, -1), C.abs().hi()) + Dyadic(2);
}

}  // namespace

RealInterval default_gate(const ParabolicRoot& root) {
  RealInterval alpha = root.alpha;
  Dyadic dist;
  if (root.period == 1) {
    // the only other marked real point is the critical point at the origin
    dist = alpha.abs().lo();
  } else {
    std::vector<RealInterval> orbit = root_orbit(root);
    bool first = true;
    for (size_t i = 1; i < orbit.size(); ++i) {
      Dyadic gap = (orbit[i] - alpha).abs().lo();
      if (first || gap < dist) dist = gap;
      first = false;
    }
  }
  if (!(dist.sign() > 0))
    throw Error(Err::internal, "gate width collapsed: orbit points overlap");
  Dyadic h = div_dir(dist, Dyadic(10), 40, Round::down);
  Dyadic m = root.alpha.mid().round_to_grid(48, Round::nearest);
  return RealInterval(m - h, m + h);
}

namespace {

TransitResult transit_core(int64_t period, const RealInterval& C,
                           const RealInterval& gate, const TransitLimits& lim) {
  Dyadic esc = escape_bar(C);
  // monotone regime: above the tangency the period-1 real orbit only ascends
  bool monotone = period == 1 && C.lo() > Dyadic::scaled(1, -2);

  for (int64_t wb = 96; wb <= lim.max_bits; wb *= 2) {
    RealInterval x(Dyadic{});
    bool entered = false, indeterminate = false;
    TransitResult res;
    res.bits_used = wb;
    for (int64_t k = 0; k <= lim.max_psteps; ++k) {
      bool in_gate = gate.contains(x);
      bool out_gate = x.hi() < gate.lo() || x.lo() > gate.hi();
      if (!in_gate && !out_gate) {
        indeterminate = true;
        break;
      }
      if (in_gate) {
        if (!entered) {
          entered = true;
          res.entry_step = k;
        }
        ++res.count;
      } else if (entered) {
        res.exit_step = k;
        return res;
      } else if (x.lo() > esc) {
        throw Error(Err::usage,
                    "invalid epsilon: critical orbit escaped before entering "
                    "the gate");
      } else if (monotone && x.lo() > gate.hi()) {
        throw Error(Err::usage,
                    "invalid epsilon: critical orbit stepped over the gate");
      }
      bool escaped_mid = false;
      for (int64_t i = 0; i < period; ++i) {
        x = (x.sqr() + C).rounded(wb);
        if (x.lo() > esc) {
          escaped_mid = true;
          break;
        }
      }
      if (escaped_mid) {
        if (entered) {
          res.exit_step = k + 1;
          return res;
        }
        throw Error(Err::usage,
                    "invalid epsilon: critical orbit escaped before entering "
                    "the gate");
      }
    }
    if (indeterminate) continue;  // escalate precision and replay
    if (!entered)
      throw Error(Err::usage,
                  "invalid epsilon: critical orbit did not enter the gate "
                  "within the step cap");
    throw Error(Err::ceiling, "gate transit exceeded the period-step cap");
  }
  throw Error(Err::ceiling,
              "gate membership undecidable at the precision ceiling");
}

}  // namespace

TransitResult gate_transit(const ParabolicRoot& root, const Dyadic& epsilon,
                           const RealInterval& gate, const TransitLimits& lim) {
  if (!(epsilon.sign() > 0))
    throw Error(Err::usage, "invalid epsilon: must be positive");
  ParabolicRoot r = ensure_bits(root, 80);
  return transit_core(root.period, r.c + RealInterval(epsilon), gate, lim);
}

TransitResult gate_transit_at(const ParabolicRoot& root, const Dyadic& c_param,
                              const RealInterval& gate,
                              const TransitLimits& lim) {
  if (!(c_param > root.c.hi()))
    throw Error(Err::usage, "parameter must lie strictly above the root");
  return transit_core(root.period, RealInterval(c_param), gate, lim);
}

ImplosionCalibration calibrate_phase(const ParabolicRoot& root,
                                     const RealInterval& gate,
                                     const Dyadic& eps_hi, const Dyadic& eps_lo,
                                     int64_t samples) {
  if (samples < 2) throw Error(Err::usage, "calibration needs >= 2 samples");
  if (!(eps_lo.sign() > 0) || !(eps_lo < eps_hi))
    throw Error(Err::usage, "calibration window must satisfy 0 < lo < hi");
  double lh = std::log(eps_hi.to_double()), ll = std::log(eps_lo.to_double());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int64_t j = 0; j < samples; ++j) {
    double t = (double)j / (double)(samples - 1);
    double ed = std::exp(lh + (ll - lh) * t);
    Dyadic eps = Dyadic::scaled((long)std::llround(ed * std::ldexp(1.0, 58)), -58);
    if (!(eps.sign() > 0)) throw Error(Err::usage, "calibration epsilon underflow");
    TransitResult tr = gate_transit(root, eps, gate);
    double x = 1.0 / std::sqrt(eps.to_double());
    double y = (double)tr.count;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double n = (double)samples;
  double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-12)
    throw Error(Err::internal, "degenerate calibration grid");
  double Cd = (n * sxy - sx * sy) / denom;
  double dd = (sy - Cd * sx) / n;
  ImplosionCalibration cal;
  cal.C = Dyadic::scaled((long)std::llround(Cd * std::ldexp(1.0, 32)), -32);
  cal.d = Dyadic::scaled((long)std::llround(dd * std::ldexp(1.0, 32)), -32);
  cal.eps_hi = eps_hi;
  cal.eps_lo = eps_lo;
  cal.samples = samples;
  cal.gate = gate;
  return cal;
}

namespace {

// lift = C * eps^{-1/2} + d at the bracket midpoint; the proxy is its
// fractional offset against the measured integer count
ImplosionSample make_sample(const ParabolicRoot& root, const Dyadic& eps_eff,
                            int64_t count, const ImplosionCalibration& cal) {
  RealInterval inv = idiv(RealInterval(Dyadic(1)), RealInterval(eps_eff), 96);
  Dyadic x = isqrt(inv, 96).mid();
  Dyadic lift = cal.C * x + cal.d - Dyadic(long(count));
  ImplosionSample s;
  s.r = root;
  s.epsilon = eps_eff;
  s.transit_count = count;
  s.phase_proxy = lift - lift.round_to_grid(0, Round::down);
  s.tau_lift_proxy = -count;
  return s;
}

}  // namespace

ImplosionSample phase_proxy(const ParabolicRoot& root, const Dyadic& epsilon,
                            const RealInterval& gate,
                            const ImplosionCalibration* calib) {
  TransitResult tr = gate_transit(root, epsilon, gate);
  ImplosionCalibration local;
  if (!calib) {
    local = calibrate_phase(root, gate, epsilon.mul_pow2(2),
                            epsilon.mul_pow2(-2), 9);
    calib = &local;
  }
  return make_sample(root, epsilon, tr.count, *calib);
}

ImplosionSample phase_proxy_at(const ParabolicRoot& root, const Dyadic& c_param,
                               const RealInterval& gate,
                               const ImplosionCalibration* calib) {
  TransitResult tr = gate_transit_at(root, c_param, gate);
  Dyadic eps_eff = c_param - root.c.mid();
  ImplosionCalibration local;
  if (!calib) {
    local = calibrate_phase(root, gate, eps_eff.mul_pow2(2),
                            eps_eff.mul_pow2(-2), 9);
    calib = &local;
  }
  return make_sample(root, eps_eff, tr.count, *calib);
}

LimitIterate geometric_limit_iterate(const ParabolicRoot& root,
                                     const Dyadic& epsilon, const Ball& z,
                                     const RealInterval& gate,
                                     int64_t working_bits) {
  TransitResult tr = gate_transit(root, epsilon, gate);
  ParabolicRoot r = ensure_bits(root, 80);
  Ball cball(r.c.mid() + epsilon, Dyadic(), r.c.rad_upper());
  Dyadic esc = escape_bar(r.c + RealInterval(epsilon));
  Precision prec(working_bits);
  LimitIterate out;
  out.steps_planned = root.period * tr.count;
  out.value = z;
  for (int64_t k = 0; k < out.steps_planned; ++k) {
    RealInterval za = out.value.abs_bracket(64);
    if (za.lo() > esc) {
      out.status = LimitStatus::escaped;
      return out;
    }
    if (out.value.is_whole_plane() || out.value.rad() > Dyadic(8)) {
      out.status = LimitStatus::undecided;
      return out;
    }
    out.value = ball_step(out.value, cball, prec);
    out.steps_done = k + 1;
  }
  out.status = LimitStatus::ok;
  return out;
}

Dyadic discover_epsilon_ceiling(const ParabolicRoot& root,
                                const RealInterval& gate, const Dyadic& hint) {
  int64_t k0 = 2;
  while (Dyadic::scaled(1, -k0) > hint && k0 < 40) ++k0;
  for (int64_t k = k0; k <= 40; ++k) {
    Dyadic eps = Dyadic::scaled(1, -k);
    try {
      gate_transit(root, eps, gate);
      return eps;
    } catch (const Error& e) {
      if (e.code != Err::usage) throw;
    }
  }
  throw Error(Err::not_found,
              "no dyadic epsilon down to 2^-40 admits a gate transit");
}

std::unique_ptr<IntervalOracle> perturbed_root_oracle(const ParabolicRoot& root,
                                                      const Dyadic& epsilon) {
  auto base = root_refiner(root);
  RealInterval c0 = root.c + RealInterval(epsilon);
  OracleDescriptor d{"root_offset",
                     {{"period", std::to_string(root.period)},
                      {"eps", epsilon.str()},
                      {"lo", c0.lo().str()},
                      {"hi", c0.hi().str()}}};
  if (Dyadic(-2) <= c0.lo() && c0.hi() <= Dyadic::scaled(1, -2))
    d.fields.emplace_back("connected_k", "1");
  auto refine = [base, epsilon](int64_t bits) -> RealInterval {
    return base(bits) + RealInterval(epsilon);
  };
  return std::make_unique<IntervalOracle>(refine, d);
}

}  // namespace jc
