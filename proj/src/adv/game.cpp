#include "adv/game.hpp"

#include "metrics/metrics.hpp"
#include "pixel/decide.hpp"
#include "pixel/estimator.hpp"
#include "pixel/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace jc {
namespace {

// ---------------------------------------------------------------- helpers

std::string dstr(const Dyadic& d) { return d.str(); }

Dyadic pow2(int64_t e) { return Dyadic::scaled(1, e); }

// the witness ladder spans offsets (0, 2^-8] above the root's grid anchor;
// every commitment that still has depths to play must keep the whole band
// (plus the root's left margin for the saddle-node re-find) in its interior
const int64_t kLadderTopExp = -8;   // largest branch offset above the anchor
const int64_t kLeftMarginExp = -13; // room left of the root for the scan

Dyadic grid_anchor(const ParabolicRoot& root) {
  return root.c.hi().round_to_grid(60, Round::up);
}

// ------------------------------------------------- condition-2 grid proxies

const GridSets& proxies_at(GameState& st, const Dyadic& c) {
  std::string key = dstr(c);
  for (const auto& e : st.proxy_cache)
    if (e.first == key) return e.second;
  DyadicOracle o(c, Dyadic());
  GridImage img = render_grid(st.cfg.cond2_window, st.cfg.cond2_grid_n, o);
  st.proxy_cache.emplace_back(key, grid_sets(img, Norm::L1));
  if (st.proxy_cache.size() > 12) st.proxy_cache.erase(st.proxy_cache.begin());
  return st.proxy_cache.back().second;
}

struct Cond2Result {
  Dyadic dJ, dK;  // exact L1 one-sided grid distances
  bool ok = false;
};

// dist(J at c_prev -> J at c_next) and dist(K at c_next -> K at c_prev),
// both required below 2^-applied plus one grid-pitch of slack
Cond2Result cond2_check(GameState& st, const Dyadic& c_prev, const Dyadic& c_next,
                        int64_t applied_exp) {
  const GridSets a = proxies_at(st, c_prev);
  const GridSets b = proxies_at(st, c_next);
  Cond2Result r;
  r.dJ = one_sided_dist(a.J_proxy, b.J_proxy).hi();
  r.dK = one_sided_dist(b.K_proxy, a.K_proxy).hi();
  Dyadic thr = pow2(-applied_exp) + pow2(-(applied_exp + 2));
  r.ok = r.dJ < thr && r.dK < thr;
  return r;
}

// -------------------------------------------- in-interval saddle-node scan

// attracting primitive period of the critical orbit at c, 0 when the orbit
// escapes or no short cycle is detected after the settling run
int64_t detect_period(double c) {
  double x = 0.0;
  for (int i = 0; i < 60000; ++i) {
    x = x * x + c;
    if (std::fabs(x) > 4.0) return 0;
  }
  double orbit[49];
  orbit[0] = x;
  for (int i = 1; i < 49; ++i) orbit[i] = orbit[i - 1] * orbit[i - 1] + c;
  for (int64_t p = 1; p <= 24; ++p)
    if (std::fabs(orbit[p] - orbit[0]) < 1e-9 &&
        std::fabs(orbit[2 * p] - orbit[0]) < 1e-9)
      return p;
  return 0;
}

// Certified saddle-node of the given period strictly inside I: samples the
// interval on an exact dyadic 2^-10 subgrid, takes the longest run of
// constant attracting period, and certifies the tangent bifurcation at the
// run's right edge (widening the bracket a few samples when the detector
// loses the slow orbits just left of the root).
ParabolicRoot find_root_in(const RealInterval& I, int64_t period) {
  const int64_t N = 1024;
  Dyadic step = I.width().mul_pow2(-10);
  if (!(step.sign() > 0)) throw Error(Err::not_found, "interval too thin for a root scan");
  auto sample = [&](int64_t j) { return I.lo() + step * Dyadic(j); };

  int64_t best_start = -1, best_len = 0, run_start = -1, run_len = 0;
  int64_t run_period = 0, best_period = 0;
  for (int64_t j = 0; j <= N; ++j) {
    int64_t p = detect_period(sample(j).to_double());
    if (p == period && p == run_period) {
      ++run_len;
    } else if (p == period) {
      run_start = j;
      run_len = 1;
      run_period = p;
    } else {
      run_period = 0;
    }
    if (run_period == period && run_len > best_len) {
      best_len = run_len;
      best_start = run_start;
      best_period = period;
    }
  }
  if (best_period != period || best_len < 2)
    throw Error(Err::not_found, "no attracting window of the requested period in the interval");
  int64_t j_last = best_start + best_len - 1;  // last sample inside the window
  if (j_last >= N)
    throw Error(Err::not_found, "period window touches the interval edge; root not bracketed");

  for (int64_t widen = 1; widen <= 8; ++widen) {
    Dyadic hi = sample(std::min<int64_t>(j_last + widen, N));
    RealInterval bracket(sample(j_last), hi);
    try {
      ParabolicRoot root = find_parabolic_root(period, bracket);
      if (!I.contains_interior(root.c))
        throw Error(Err::not_found, "certified root leaves the interval");
      return root;
    } catch (const Error& e) {
      if (e.code != Err::not_found || j_last + widen >= N) throw;
    }
  }
  throw Error(Err::not_found, "saddle-node certification failed in the scanned window");
}

// ------------------------------------------------------- evidence builders

struct Evidence {
  RealInterval bracket{Dyadic(), Dyadic()};
  bool upper_finite = false;
  int64_t precision = 0;
};

// certified dist(p, J at c_used) <= bracket.hi with bracket.hi <= 2^-(l+4)
Evidence near_evidence(const DyadicPoint& p, const Dyadic& c_used, int64_t l,
                       int64_t extra_bits, const WitnessBudget& wb) {
  DyadicOracle o(c_used, Dyadic());
  CostMeter meter;
  int64_t budget = wb.dist_budget * (int64_t(1) << (2 * extra_bits));
  DistanceBracket de = distance_estimate(p, o, meter, l + 5 + extra_bits, budget);
  if (de.undecided || de.upper_infinite)
    throw Error(Err::not_found, "near evidence: distance bracket undecided");
  Evidence ev;
  ev.bracket = RealInterval(de.lower, de.upper);
  ev.upper_finite = true;
  ev.precision = static_cast<int64_t>(meter.max_precision);
  return ev;
}

// certified K-free Euclidean disk of the given radius around p at c_used;
// the upper endpoint records only the trivial |p| + 2 bound
Evidence far_evidence(const DyadicPoint& p, const Dyadic& c_used, int64_t l,
                      const Dyadic& radius, int64_t extra_bits,
                      const WitnessBudget& wb) {
  DyadicOracle o(c_used, Dyadic());
  CostMeter meter;
  int64_t n_check = l + 4 + extra_bits;
  Precision prec = decide_working_precision(n_check);
  Ball cball = o.c_ball(decide_oracle_precision(n_check), meter);
  TrapSet traps = find_traps(cball, prec, meter);
  CoverBudget cb;
  cb.max_cells = wb.cover_cells;
  cb.iter_cap = 2048;
  cb.max_depth = 14;
  cb.tick_cap = wb.cover_ticks * (int64_t(1) << (2 * extra_bits));
  CoverOutcome co = cover_region(p.x, p.y, radius, RegionShape::euclid_disk,
                                 cball, traps, cb, prec, meter);
  if (co.verdict != RegionVerdict::all_escaping)
    throw Error(Err::not_found, "far evidence: disk not certified escaping");
  Evidence ev;
  ev.bracket = RealInterval(radius, norm1(p.x, p.y) + Dyadic(3));
  ev.upper_finite = false;
  ev.precision = static_cast<int64_t>(meter.max_precision);
  return ev;
}

// ------------------------------------------------------------------ replay

// serves a recorded transcript back to a machine, verbatim and in order
class ReplayOracle final : public OracleTape {
 public:
  explicit ReplayOracle(std::vector<TranscriptEntry> entries)
      : entries_(std::move(entries)) {}
  bool fully_consumed() const { return next_ == entries_.size(); }
  int64_t overruns() const { return overruns_; }
  OracleDescriptor descriptor() const override {
    return OracleDescriptor{"replay", {}};
  }

 protected:
  std::pair<Dyadic, Dyadic> answer(int64_t m) override {
    if (next_ >= entries_.size()) {
      // a genuinely timed-out run may have been preempted on the charge for
      // its next query, which is then absent from the transcript; serve a
      // dummy that the budget check must swallow before the machine sees it
      ++overruns_;
      return {Dyadic(), Dyadic()};
    }
    const TranscriptEntry& e = entries_[next_];
    if (e.m != m) throw Error(Err::usage, "replay: query precision differs from the transcript");
    ++next_;
    return {e.re, e.im};
  }

 private:
  std::vector<TranscriptEntry> entries_;
  size_t next_ = 0;
  int64_t overruns_ = 0;
};

// the guarantee band of a served answer must keep the committed interval
// plausible: every real in I must be within 2^-(m-1) of the answer
bool band_covers(const TranscriptEntry& e, const RealInterval& I, std::string* why) {
  Dyadic band = pow2(-(e.m - 1));
  bool ok = e.re - band < I.lo() && I.hi() < e.re + band && e.im.abs() < band;
  if (!ok && why) {
    std::ostringstream os;
    os << "served answer at m=" << e.m << " (re=" << dstr(e.re)
       << ") excludes part of the interval [" << dstr(I.lo()) << ", "
       << dstr(I.hi()) << "]";
    *why = os.str();
  }
  return ok;
}

uint64_t budget_exp_cap(uint64_t budget) {
  return std::min<uint64_t>(budget, uint64_t(1) << 20);
}

}  // namespace

const char* violated_side_name(ViolatedSide v) {
  switch (v) {
    case ViolatedSide::answered_zero_but_near: return "AnsweredZeroButNear";
    case ViolatedSide::answered_one_but_far: return "AnsweredOneButFar";
    case ViolatedSide::timed_out: return "TimedOut";
  }
  return "?";
}

GameState init_game(const GameConfig& cfg) {
  if (cfg.max_depth < 0) throw Error(Err::usage, "negative depth");
  if (cfg.l_start < 6) throw Error(Err::usage, "l_start below the witness floor of 6");
  GameState st;
  st.cfg = cfg;
  st.root = find_parabolic_root(cfg.base_period, cfg.base_bracket);
  st.rhat = grid_anchor(st.root);
  Dyadic lo = st.rhat - pow2(kLadderTopExp);
  Dyadic hi = st.rhat + pow2(kLadderTopExp) + pow2(kLadderTopExp - 1);
  st.c_interval = RealInterval(lo, hi);
  if (!st.c_interval.contains_interior(st.root.c))
    throw Error(Err::internal, "base commitment does not enclose the root");
  st.commitments.push_back(st.c_interval);
  return st;
}

void player_step(GameState& st, const MachineSpec& machine) {
  const GameConfig& cfg = st.cfg;
  if (st.depth >= cfg.max_depth) throw Error(Err::usage, "game already at max depth");
  const int64_t k = st.depth + 1;  // 1-based depth being played
  const int64_t l = cfg.l_start + (k - 1) * cfg.l_stride;
  const bool final_depth = (k == cfg.max_depth);

  // fresh witness at this depth's scale, anchored at the current root
  DiscontinuityWitness w = find_discontinuity_witness(st.root, l, cfg.witness);

  // run the machine with the parameter oracle pinned to the root interval
  DeferredOracle pinned(st.root.c, root_refiner(st.root));
  PixelQuery q{w.z0, l};
  MachineOutcome out = run_machine(machine, q, pinned);

  // branch selection: the machine's answer picks the falsifying parameter;
  // a timeout picks the branch nearest the current midpoint
  ViolatedSide side;
  int branch;
  Dyadic c_used;
  if (out.answer == 0) {
    side = ViolatedSide::answered_zero_but_near;
    branch = 1;
    c_used = w.c1;
  } else if (out.answer == 1) {
    side = ViolatedSide::answered_one_but_far;
    branch = 2;
    c_used = w.c2;
  } else {
    side = ViolatedSide::timed_out;
    Dyadic m = st.c_interval.mid();
    Dyadic d1 = (w.c1 - m).abs(), d2 = (w.c2 - m).abs();
    branch = (d1 <= d2) ? 1 : 2;
    c_used = (branch == 1) ? w.c1 : w.c2;
  }

  // commitment: the midpoint moves a quarter of the way toward the chosen
  // branch and the width contracts by 3/4 (both exact dyadic operations);
  // the final depth instead pins a window around c_used whose width meets
  // the raw 2^-3l and 2^-T(l) step bounds literally
  RealInterval prev = st.c_interval;
  Dyadic mid_prev = prev.mid();
  RealInterval cand(Dyadic(), Dyadic());
  Dyadic mid_next;
  if (!final_depth) {
    mid_next = mid_prev + (c_used - mid_prev).mul_pow2(-2);
    Dyadic w_next = prev.width() - prev.width().mul_pow2(-2);
    Dyadic h = w_next.mul_pow2(-1);
    cand = RealInterval(mid_next - h, mid_next + h);
  } else {
    int64_t raw = std::max<int64_t>(3 * l, (int64_t)budget_exp_cap(out.budget));
    int64_t e = std::min<int64_t>(raw + 2, int64_t(1) << 14);
    cand = RealInterval(c_used - pow2(-e), c_used + pow2(-e));
    mid_next = c_used;
  }

  // structural guards: strict nesting, shrinking width, branch-band
  // availability for the remaining depths, and compatibility with every
  // oracle answer served so far (the indistinguishability invariant)
  if (!(prev.lo() < cand.lo() && cand.hi() < prev.hi()))
    throw Error(Err::ceiling, "commitment not strictly nested");
  if (!(cand.width() < prev.width()))
    throw Error(Err::ceiling, "commitment width did not shrink");
  if (!final_depth) {
    if (!(cand.lo() < st.rhat - pow2(kLeftMarginExp) &&
          st.rhat + pow2(kLadderTopExp) < cand.hi()))
      throw Error(Err::ceiling, "desk-scale depth limit: witness band leaves the commitment");
  }
  std::string band_why;
  for (const auto& e : st.served)
    if (!band_covers(e, cand, &band_why))
      throw Error(Err::ceiling, "commitment clashes with a past answer: " + band_why);
  for (const auto& e : out.transcript)
    if (!band_covers(e, cand, &band_why))
      throw Error(Err::ceiling, "commitment clashes with this run's answer: " + band_why);

  // step-size bounds: the construction exponents 3*l and T(l), applied at
  // the desk-scale ceiling; the inequality is checked exactly
  Dyadic mid_step = (mid_next - mid_prev).abs();
  int64_t cond3_raw = 3 * l;
  int64_t drift_raw = (int64_t)budget_exp_cap(out.budget);
  int64_t cond3_applied = std::min(cond3_raw, cfg.step_ceiling);
  int64_t drift_applied = std::min(drift_raw, cfg.step_ceiling);
  bool step_ok = mid_step < pow2(-cond3_applied) && mid_step < pow2(-drift_applied);
  if (!step_ok)
    throw Error(Err::ceiling, "midpoint step exceeds the applied step bound");

  // condition-2 at grid scale between the consecutive committed midpoints
  int64_t l_prev = (k >= 2) ? cfg.l_start + (k - 2) * cfg.l_stride : l;
  int64_t cond2_raw = 3 * l_prev;
  int64_t cond2_applied = std::min(cond2_raw, cfg.cond2_ceiling);
  Cond2Result c2 = cond2_check(st, mid_prev, mid_next, cond2_applied);
  if (!c2.ok)
    throw Error(Err::ceiling,
                "set-proximity check failed at grid scale: dJ=" + dstr(c2.dJ) +
                    " dK=" + dstr(c2.dK));

  // evidence: certify the violation at the committed branch parameter
  Evidence ev;
  if (branch == 1) {
    ev = near_evidence(w.z0, c_used, l, 0, cfg.witness);
    if (!(ev.bracket.hi() <= pow2(-(l + 4))))
      throw Error(Err::internal, "near evidence misses the construction bound");
  } else {
    ev = far_evidence(w.z0, c_used, l, pow2(4 - l), 0, cfg.witness);
  }

  // fresh root for the next depth, strictly inside the new commitment
  ParabolicRoot next_root = st.root;
  int64_t root_period = 0;
  RealInterval root_interval(Dyadic(), Dyadic());
  if (!final_depth) {
    next_root = find_root_in(cand, cfg.base_period);
    root_period = next_root.period;
    root_interval = next_root.c;
  }

  Certificate cert;
  cert.depth = k;
  cert.machine_id = machine.id;
  cert.machine_name = machine.name;
  cert.budget_desc = machine.budget_desc;
  cert.l = l;
  cert.p = w.z0;
  cert.answer = out.answer;
  cert.violated_side = side;
  cert.branch = branch;
  cert.c_used = c_used;
  cert.evidence = ev.bracket;
  cert.evidence_upper_finite = ev.upper_finite;
  cert.transcript = out.transcript;
  cert.ticks = out.ticks;
  cert.budget = out.budget;
  cert.max_m_queried = out.max_m_queried;
  cert.verified_at_precision = ev.precision;
  if (branch == 1) {
    // slack between the construction bound 2^-(l+4) and the certificate
    // threshold 2^-(l+1), split between rendering error and parameter drift
    cert.render_budget = Dyadic::scaled(7, -(l + 5));
    cert.drift_budget = Dyadic::scaled(7, -(l + 5));
  } else {
    // slack between the certified radius 16*2^-l and the threshold 3*2^-l
    cert.render_budget = Dyadic::scaled(13, -(l + 1));
    cert.drift_budget = Dyadic::scaled(13, -(l + 1));
  }
  st.certificates.push_back(cert);

  DepthRecord rec;
  rec.depth = k;
  rec.l = l;
  rec.machine_id = machine.id;
  rec.machine_name = machine.name;
  rec.pixel = w.z0;
  rec.answer = out.answer;
  rec.branch = branch;
  rec.interval = cand;
  rec.mid_step = mid_step;
  rec.ticks = out.ticks;
  rec.budget = out.budget;
  rec.max_m_queried = out.max_m_queried;
  rec.cond3_raw_exp = cond3_raw;
  rec.cond3_applied_exp = cond3_applied;
  rec.drift_raw_exp = drift_raw;
  rec.drift_applied_exp = drift_applied;
  rec.step_ok = step_ok;
  rec.cond2_raw_exp = cond2_raw;
  rec.cond2_applied_exp = cond2_applied;
  rec.cond2_j = c2.dJ;
  rec.cond2_k = c2.dK;
  rec.cond2_ok = c2.ok;
  rec.root_period = root_period;
  rec.root_interval = root_interval;
  rec.cert_ref = (int64_t)st.certificates.size() - 1;
  st.history.push_back(rec);

  st.depth = k;
  st.c_interval = cand;
  st.commitments.push_back(cand);
  for (const auto& e : out.transcript) st.served.push_back(e);
  if (!final_depth) {
    st.root = next_root;
    st.rhat = grid_anchor(st.root);
  }
}

GameState run_game(const std::vector<MachineSpec>& roster, const GameConfig& cfg) {
  if ((int64_t)roster.size() < cfg.max_depth)
    throw Error(Err::usage, "max_depth exceeds the roster size");
  GameState st = init_game(cfg);
  for (int64_t k = 0; k < cfg.max_depth; ++k) {
    try {
      player_step(st, roster[k]);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "depth " << (k + 1) << " aborted (code " << (int)e.code << "): " << e.msg;
      st.notes.push_back(os.str());
      break;
    }
  }

  bool ok = (int64_t)st.certificates.size() == cfg.max_depth;
  std::string why;
  for (const auto& e : st.served)
    if (!band_covers(e, st.c_interval, &why)) {
      st.notes.push_back("final indistinguishability failed: " + why);
      ok = false;
    }
  for (const auto& cert : st.certificates)
    if (!verify_certificate(cert, st, &why, 2)) {
      std::ostringstream os;
      os << "certificate at depth " << cert.depth << " failed re-verification: " << why;
      st.notes.push_back(os.str());
      ok = false;
    }
  st.verified = ok;
  return st;
}

bool verify_certificate(const Certificate& cert, GameState& st, std::string* why,
                        int64_t extra_bits) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (cert.depth < 1 || cert.depth > (int64_t)st.history.size())
    return fail("certificate depth outside the recorded game");
  if (cert.branch != 1 && cert.branch != 2) return fail("invalid branch");

  // answer/side consistency
  if (cert.answer == 0 && (cert.violated_side != ViolatedSide::answered_zero_but_near ||
                           cert.branch != 1))
    return fail("answer 0 must claim the near side on branch 1");
  if (cert.answer == 1 && (cert.violated_side != ViolatedSide::answered_one_but_far ||
                           cert.branch != 2))
    return fail("answer 1 must claim the far side on branch 2");
  if (cert.answer < 0 && cert.violated_side != ViolatedSide::timed_out)
    return fail("missing answer must claim a timeout");
  if (cert.answer > 1) return fail("answer is not a bit");

  // replay the machine run against the recorded transcript
  MachineSpec m;
  try {
    m = make_machine(cert.machine_id, cert.machine_name, cert.budget_desc);
  } catch (const Error& e) {
    return fail("machine rebuild failed: " + e.msg);
  }
  ReplayOracle replay(cert.transcript);
  MachineOutcome out;
  try {
    out = run_machine(m, PixelQuery{cert.p, cert.l}, replay);
  } catch (const Error& e) {
    return fail("replay run failed: " + e.msg);
  }
  if (out.timed_out != (cert.answer < 0)) return fail("replay timeout flag differs");
  if (!out.timed_out && out.answer != cert.answer) return fail("replay answer differs");
  if (out.ticks != cert.ticks) return fail("replay tick count differs");
  if (!replay.fully_consumed())
    return fail("transcript holds queries the machine never made");
  if (replay.overruns() > (out.timed_out ? 1 : 0))
    return fail("machine queried past the recorded transcript");

  // every served answer must remain valid for the final committed interval
  std::string band_why;
  for (const auto& e : cert.transcript)
    if (!band_covers(e, st.c_interval, &band_why))
      return fail("transcript breaks indistinguishability: " + band_why);

  // evidence thresholds (condition-(1) form) on the recorded claim, then a
  // from-scratch re-certification at increased oracle precision
  try {
    if (cert.branch == 1) {
      if (!cert.evidence_upper_finite) return fail("near certificate lacks a certified upper bound");
      if (!(cert.evidence.hi() < pow2(-(cert.l + 1))))
        return fail("recorded near bound exceeds the certificate threshold");
      Evidence ev = near_evidence(cert.p, cert.c_used, cert.l, extra_bits, st.cfg.witness);
      if (!(ev.bracket.hi() < pow2(-(cert.l + 1))))
        return fail("fresh near bound exceeds the certificate threshold");
    } else {
      if (!(cert.evidence.lo() > Dyadic::scaled(3, -cert.l)))
        return fail("recorded K-free radius below the certificate threshold");
      Evidence ev = far_evidence(cert.p, cert.c_used, cert.l, cert.evidence.lo(),
                                 extra_bits, st.cfg.witness);
      (void)ev;
    }
  } catch (const Error& e) {
    return fail("evidence re-certification failed: " + e.msg);
  }

  // step-bound chain (condition 3 and the budget drift), checked exactly on
  // the recorded commitments
  for (const auto& rec : st.history) {
    if (!(rec.mid_step < pow2(-rec.cond3_applied_exp)))
      return fail("recorded midpoint step violates the 3l bound");
    if (!(rec.mid_step < pow2(-rec.drift_applied_exp)))
      return fail("recorded midpoint step violates the budget drift bound");
  }

  // condition-2 persistence: the violation transported from the branch
  // parameter to the final midpoint at grid scale (near certificates need
  // the J proxy carried forward, far certificates the K proxy carried back)
  Dyadic fm = st.c_interval.mid();
  if (!(fm == cert.c_used)) {
    int64_t applied = std::min(3 * cert.l, st.cfg.cond2_ceiling);
    Dyadic thr = pow2(-applied) + pow2(-(applied + 2));
    const GridSets at_used = proxies_at(st, cert.c_used);
    const GridSets at_final = proxies_at(st, fm);
    if (cert.branch == 1) {
      Dyadic dj = one_sided_dist(at_used.J_proxy, at_final.J_proxy).hi();
      if (!(dj < thr)) return fail("near violation does not persist to the final parameter");
    } else {
      Dyadic dk = one_sided_dist(at_final.K_proxy, at_used.K_proxy).hi();
      if (!(dk < thr)) return fail("far violation does not persist to the final parameter");
    }
  }
  return true;
}

}  // namespace jc
