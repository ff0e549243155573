#include "adv/machines.hpp"

#include "pixel/estimator.hpp"

#include <cmath>
#include <cstdlib>

namespace jc {

namespace {

// ---- budgeted distance estimator (name "est") -------------------------------
//
// Honest-effort estimator at desk scale: reads the parameter coarse-first
// (8, 16, 32, 64 bits), shadows the orbit in doubles with the derivative, and
// answers from the Milnor estimate |z| log|z| / |z'| once the orbit certifiably
// blows up. Bounded orbits are recognized by a trend test on the distance to
// the recent past: attracted orbits (even slowly attracted, multiplier near 1)
// approach a low-period cycle monotonically, while chaotic bounded orbits do
// not. Pixels that neither escape nor show the trend exhaust the whole ladder,
// which is the expensive case near a parabolic parameter.
constexpr int64_t kRungs[4] = {8, 16, 32, 64};
constexpr int64_t kItersPerBit = 32;  // rung m iterates 32*m times
constexpr int kLagMax = 12;           // cycle lags tried by the trend test
constexpr int kBlock = 24;            // iterations per trend block
constexpr int kMonoBlocks = 12;       // consecutive shrinking blocks to bail

int estimator_proc(const PixelQuery& q, OracleTape& oracle, CostMeter& meter) {
  const double px = q.p.x.to_double(), py = q.p.y.to_double();
  const double thr = std::ldexp(1.0, -int(q.n));  // 2^-n
  for (int64_t m : kRungs) {
    auto a = oracle.query(m, meter);  // charges m ticks
    const double cr = a.first.to_double(), ci = a.second.to_double();
    double zx = px, zy = py, dx = 1.0, dy = 0.0;
    double ring[kLagMax + 1][2];
    for (auto& r : ring) r[0] = r[1] = 1e300;
    double block_min = 1e300, prev_min = 1e300, mono_start = 1e300;
    int mono = 0;
    const int64_t iters = kItersPerBit * m;
    for (int64_t k = 1; k <= iters; ++k) {
      meter.charge(1);
      const double ndx = 2.0 * (zx * dx - zy * dy), ndy = 2.0 * (zx * dy + zy * dx);
      const double nzx = zx * zx - zy * zy + cr, nzy = 2.0 * zx * zy + ci;
      dx = ndx, dy = ndy, zx = nzx, zy = nzy;
      const double r2 = zx * zx + zy * zy;
      if (!std::isfinite(r2)) return 0;  // numeric blowup: certainly escaping
      if (r2 > 1.0e8) {
        // deep escape: Milnor estimate, right up to bounded distortion
        const double dr2 = dx * dx + dy * dy;
        if (!(dr2 > 0.0) || !std::isfinite(dr2)) return 0;
        const double est = std::sqrt(r2 / dr2) * 0.5 * std::log(r2);
        if (est > 4.0 * thr) return 0;
        if (est < thr) return 1;
        return est < 2.0 * thr ? 1 : 0;  // band pixel: either answer allowed
      }
      // trend test against the recent past
      double s = 1e300;
      for (int p = 1; p <= kLagMax && p < k; ++p) {
        const double ex = zx - ring[(k - p) % (kLagMax + 1)][0];
        const double ey = zy - ring[(k - p) % (kLagMax + 1)][1];
        const double d2 = ex * ex + ey * ey;
        if (d2 < s) s = d2;
      }
      ring[k % (kLagMax + 1)][0] = zx;
      ring[k % (kLagMax + 1)][1] = zy;
      if (s < block_min) block_min = s;
      if (k % kBlock == 0) {
        if (block_min < 1.0e-18) return 0;  // locked onto a short cycle
        if (block_min < prev_min) {
          if (mono == 0) mono_start = block_min;
          if (++mono >= kMonoBlocks && block_min < 0.9 * mono_start)
            return 0;  // sustained approach to a cycle: attracted, not near J
        } else {
          mono = 0;
        }
        prev_min = block_min;
        block_min = 1e300;
      }
    }
  }
  return 0;  // ladder exhausted without escape: report far
}

// ---- certified estimator (name "est_cert") ----------------------------------
//
// Answers only from a certified distance bracket; when the bracket straddles
// the decision bands it escalates the target resolution and tries again, so
// on pixels where the bands cannot be separated (the witness pixels near a
// parabolic root) it runs until the budget preempts it, however large.
int certified_estimator_proc(const PixelQuery& q, OracleTape& oracle, CostMeter& meter) {
  const Dyadic lo_thr = Dyadic::scaled(1, -q.n);       // 2^-n
  const Dyadic hi_thr = Dyadic::scaled(1, -(q.n - 1)); // 2*2^-n
  for (int64_t target = q.n + 2;; target += 4) {
    meter.charge(1);
    DistanceBracket de = distance_estimate(q.p, oracle, meter, target, 1 << 20);
    if (!de.undecided) {
      if (de.lower > lo_thr) return 0;
      if (!de.upper_infinite && de.upper < hi_thr) return 1;
    }
  }
}

// ---- escape-time machine (name "escape") ------------------------------------
int escape_time_proc(const PixelQuery& q, OracleTape& oracle, CostMeter& meter) {
  auto a = oracle.query(q.n + 2, meter);
  const double cr = a.first.to_double(), ci = a.second.to_double();
  double zx = q.p.x.to_double(), zy = q.p.y.to_double();
  const int64_t cap = 64 + 16 * q.n;
  for (int64_t k = 0; k < cap; ++k) {
    meter.charge(1);
    const double nzx = zx * zx - zy * zy + cr, nzy = 2.0 * zx * zy + ci;
    zx = nzx, zy = nzy;
    if (zx * zx + zy * zy > 16.0) return 0;  // escaped: far
  }
  return 1;  // still bounded at the cap: treat as near
}

uint64_t checked_mul(uint64_t a, uint64_t b) {
  if (b != 0 && a > UINT64_MAX / b) throw Error(Err::usage, "budget overflows");
  return a * b;
}

}  // namespace

std::function<uint64_t(int64_t)> parse_budget(const std::string& desc) {
  // grammar: factor ('*' factor)*, factor = integer | 'l'
  std::vector<std::string> toks;
  std::string cur;
  for (char ch : desc) {
    if (ch == ' ' || ch == '\t') continue;
    if (ch == '*') {
      toks.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  toks.push_back(cur);
  struct Factor {
    bool is_l;
    uint64_t v;
  };
  std::vector<Factor> factors;
  for (const auto& t : toks) {
    if (t == "l") {
      factors.push_back({true, 0});
    } else if (!t.empty() && t.find_first_not_of("0123456789") == std::string::npos) {
      factors.push_back({false, std::strtoull(t.c_str(), nullptr, 10)});
    } else {
      throw Error(Err::usage, "cannot parse budget '" + desc +
                                  "': factors must be integers or l");
    }
  }
  return [factors](int64_t l) {
    if (l < 1) throw Error(Err::usage, "budget requires l >= 1");
    uint64_t v = 1;
    for (const auto& f : factors) v = checked_mul(v, f.is_l ? uint64_t(l) : f.v);
    return v;
  };
}

MachineSpec make_machine(int64_t id, const std::string& name,
                         const std::string& budget_desc) {
  MachineSpec m;
  m.id = id;
  m.name = name;
  m.budget_desc = budget_desc;
  m.budget_T = parse_budget(budget_desc);
  if (name == "const0") {
    m.proc = [](const PixelQuery&, OracleTape&, CostMeter& meter) {
      meter.charge(1);
      return 0;
    };
  } else if (name == "const1") {
    m.proc = [](const PixelQuery&, OracleTape&, CostMeter& meter) {
      meter.charge(1);
      return 1;
    };
  } else if (name == "est") {
    m.proc = estimator_proc;
  } else if (name == "est_cert") {
    m.proc = certified_estimator_proc;
  } else if (name == "escape") {
    m.proc = escape_time_proc;
  } else {
    throw Error(Err::usage, "unknown machine '" + name +
                                "' (known: const0 const1 est est_cert escape)");
  }
  return m;
}

std::vector<MachineSpec> make_roster(const std::vector<std::string>& names,
                                     const std::string& budget_desc) {
  std::vector<MachineSpec> r;
  for (size_t i = 0; i < names.size(); ++i)
    r.push_back(make_machine(int64_t(i), names[i], budget_desc));
  return r;
}

std::vector<MachineSpec> demo_roster(const std::string& budget_desc) {
  return make_roster({"const0", "const1", "est"}, budget_desc);
}

MachineOutcome run_machine(const MachineSpec& m, const PixelQuery& q, OracleTape& oracle) {
  MachineOutcome out;
  out.machine_id = m.id;
  out.machine_name = m.name;
  out.budget = m.budget_T(q.n);
  oracle.clear_transcript();
  CostMeter meter;
  meter.limit = out.budget;
  try {
    out.answer = m.proc(q, oracle, meter);
    if (out.answer != 0 && out.answer != 1)
      throw Error(Err::internal, "machine '" + m.name + "' returned a non-bit");
  } catch (const Error& e) {
    if (e.code != Err::ceiling) throw;
    out.timed_out = true;
    out.answer = -1;
  }
  out.ticks = meter.ticks;
  out.max_m_queried = meter.max_precision;
  out.transcript = oracle.transcript();
  if (!out.timed_out && (out.max_m_queried > out.ticks || out.ticks > out.budget))
    throw Error(Err::internal, "cost accounting violated Sigma charges");
  return out;
}

TickMeasurement measure_machine_T(const MachineSpec& m, int64_t n, int64_t C,
                                  const Dyadic& c_re, const Dyadic& c_im,
                                  int64_t exhaustive_limit, int64_t sample_count,
                                  uint64_t seed) {
  PixelProc proc = [&](const DyadicPoint& p, CostMeter& meter) {
    DyadicOracle oracle(c_re, c_im);
    PixelQuery q{p, n};
    m.proc(q, oracle, meter);
  };
  return measure_T(proc, n, C, exhaustive_limit, sample_count, seed);
}

}  // namespace jc
