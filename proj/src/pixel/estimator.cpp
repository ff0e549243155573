#include "pixel/estimator.hpp"

#include <cmath>
#include <complex>
#include <deque>

namespace jc {

namespace {

// upper bound on sqrt(2), enough bits that the slack is harmless
const Dyadic& sqrt2_upper() {
  static Dyadic v = sqrt_upper(Dyadic(2), 64);
  return v;
}

Dyadic dyadic_from_double(double v, int64_t snap_bits) {
  if (!std::isfinite(v)) throw Error(Err::internal, "non-finite double");
  int e = 0;
  double fr = std::frexp(v, &e);
  long man = static_cast<long>(std::llround(fr * 9007199254740992.0));  // 2^53
  Dyadic d(mpz_class(man), static_cast<int64_t>(e) - 53);
  return d.round_to_grid(snap_bits, Round::nearest);
}

// Euclidean |a - b| bounds via exact squared norm
Dyadic dist_upper(const Dyadic& ax, const Dyadic& ay, const Dyadic& bx,
                  const Dyadic& by) {
  Dyadic dx = ax - bx, dy = ay - by;
  return sqrt_upper(dx * dx + dy * dy, 64);
}

Dyadic abs_upper(const Dyadic& x, const Dyadic& y) {
  return sqrt_upper(x * x + y * y, 64);
}

Dyadic abs_lower(const Dyadic& x, const Dyadic& y) {
  return sqrt_lower(x * x + y * y, 64);
}

// For a monic quadratic P with |P(u)| <= R whose roots are p1, p2 and with
// |u - p2| >= sep - |u - p1|: the nearer root satisfies both
// |u - p1| <= sqrt(R) and, when sep > sqrt(R), |u - p1| <= R/(sep - sqrt(R)).
Dyadic root_proximity(const Dyadic& R, const Dyadic& sep) {
  Dyadic s = sqrt_upper(R, 64);
  if (sep > s) {
    Dyadic lin = div_dir(R, sep - s, 64, Round::up);
    return min(s, lin);
  }
  return s;
}

// certifies f_c^period maps the disk into itself; then the disk is in K_c
bool disk_trap_holds(const Dyadic& wx, const Dyadic& wy, const Dyadic& r,
                     int64_t period, const Ball& c, const Precision& prec,
                     CostMeter& meter, std::vector<Ball>* chain) {
  Ball cur(wx, wy, r);
  if (chain) chain->clear();
  for (int64_t j = 0; j < period; ++j) {
    meter.charge(1);
    cur = ball_step(cur, c, prec);
    if (cur.is_whole_plane()) return false;
    if (chain && j + 1 < period) chain->push_back(cur);
  }
  Dyadic dc = dist_upper(cur.re(), cur.im(), wx, wy);
  return dc + cur.rad() <= r;
}

bool rect_trap_holds(const RealInterval& x, const RealInterval& y, const Ball& c) {
  if (!c.is_exact() || !c.im().is_zero()) return false;  // thin rects need exact real c
  RealInterval nx = x.sqr() - y.sqr() + RealInterval(c.re());
  RealInterval ny = (x * y).mul_pow2(1);
  return x.contains(nx) && y.contains(ny);
}

// K-point witnesses: disks certified to contain at least one point of K_c
// for every c in the ball. Seeds are the fixed points (roots of z^2 - z + c)
// and the 2-cycle (roots of z^2 + z + c + 1); both families lie in K_c for
// every c. The enclosure radius comes from the exact polynomial residual at
// a snapped double-precision root: the product of the distances to the two
// roots equals |P(u0)|, so the nearer root is within root_proximity of u0.
// Preimages of a witness are again in K_c (K_c is fully invariant), and the
// same product argument certifies them, so a breadth-first inverse orbit
// spreads witnesses along the Julia set.
void add_point_witnesses(TrapSet& traps, const Ball& c, CostMeter& meter) {
  if (c.is_whole_plane()) return;
  const int64_t kSnap = 80;
  const size_t kMaxWitnesses = 48;
  const Dyadic r_cap = Dyadic::scaled(1, -8);
  const double kDedup = 0.03;

  double cr = c.re().to_double(), ci = c.im().to_double();
  std::complex<double> c0(cr, ci);

  std::vector<std::pair<double, double>> placed;
  auto near_existing = [&](double x, double y) {
    for (const auto& [px, py] : placed)
      if (std::hypot(px - x, py - y) < kDedup) return true;
    return false;
  };

  auto certify_seed = [&](std::complex<double> z0, bool period_two)
      -> std::optional<KPointWitness> {
    meter.charge(1);
    Dyadic x = dyadic_from_double(z0.real(), kSnap);
    Dyadic y = dyadic_from_double(z0.imag(), kSnap);
    Dyadic pre = x * x - y * y + c.re();  // Re(z0^2 + c_center)
    Dyadic pim = (x * y).mul_pow2(1) + c.im();
    Dyadic rre, rim, bre, bim;
    if (period_two) {
      rre = pre + x + Dyadic(1);
      rim = pim + y;
      bre = x.mul_pow2(1) + Dyadic(1);  // roots sum to -1
      bim = y.mul_pow2(1);
    } else {
      rre = pre - x;
      rim = pim - y;
      bre = x.mul_pow2(1) - Dyadic(1);  // roots sum to 1
      bim = y.mul_pow2(1);
    }
    Dyadic R = abs_upper(rre, rim) + c.rad();
    Dyadic r = root_proximity(R, abs_lower(bre, bim));
    if (r > r_cap) return std::nullopt;
    return KPointWitness{x, y, r};
  };

  std::deque<KPointWitness> queue;
  auto place = [&](const KPointWitness& w) {
    traps.witnesses.push_back(w);
    placed.emplace_back(w.wx.to_double(), w.wy.to_double());
    queue.push_back(w);
  };

  std::complex<double> s1 = std::sqrt(std::complex<double>(1.0 - 4.0 * cr, -4.0 * ci));
  std::complex<double> s2 = std::sqrt(std::complex<double>(-3.0 - 4.0 * cr, -4.0 * ci));
  const std::pair<std::complex<double>, bool> seeds[4] = {
      {(1.0 + s1) / 2.0, false},
      {(1.0 - s1) / 2.0, false},
      {(-1.0 + s2) / 2.0, true},
      {(-1.0 - s2) / 2.0, true}};
  for (const auto& [z0, p2] : seeds) {
    if (near_existing(z0.real(), z0.imag())) continue;
    if (auto w = certify_seed(z0, p2)) place(*w);
  }

  while (!queue.empty() && traps.witnesses.size() < kMaxWitnesses) {
    KPointWitness parent = queue.front();
    queue.pop_front();
    std::complex<double> w(parent.wx.to_double(), parent.wy.to_double());
    std::complex<double> u = std::sqrt(w - c0);
    for (std::complex<double> cand : {u, -u}) {
      if (traps.witnesses.size() >= kMaxWitnesses) break;
      if (near_existing(cand.real(), cand.imag())) continue;
      meter.charge(1);
      Dyadic x = dyadic_from_double(cand.real(), kSnap);
      Dyadic y = dyadic_from_double(cand.imag(), kSnap);
      // u0^2 + c - x_c has the two preimages of x_c as roots (sum zero)
      Dyadic ure = x * x - y * y + c.re() - parent.wx;
      Dyadic uim = (x * y).mul_pow2(1) + c.im() - parent.wy;
      Dyadic R = abs_upper(ure, uim) + c.rad() + parent.r;
      Dyadic r = root_proximity(R, abs_lower(x.mul_pow2(1), y.mul_pow2(1)));
      if (r > r_cap) continue;
      place({x, y, r});
    }
  }
}

}  // namespace

TrapSet find_traps(const Ball& c, const Precision& prec, CostMeter& meter) {
  TrapSet traps;
  if (c.is_whole_plane()) return traps;

  // invariant segment at exact real c <= -2 boundary case: [-2,2] x {0}
  if (c.is_exact() && c.im().is_zero()) {
    RealInterval sx(Dyadic(-2), Dyadic(2)), sy((Dyadic()));
    if (rect_trap_holds(sx, sy, c)) traps.rects.push_back({sx, sy});
  }

  // central invariant disk: |c| + r^2 <= r has the root r = (1+sqrt(1-4|c|))/2,
  // the largest disk around 0 mapped into itself; reaches the unit circle at c=0
  Dyadic cu = c.abs_bracket(64).hi();
  if (cu <= Dyadic::scaled(1, -2)) {
    Dyadic s = sqrt_lower(Dyadic(1) - cu.mul_pow2(2), 80);
    Dyadic r = (Dyadic(1) + s).mul_pow2(-1) - min(Dyadic::scaled(1, -70), s.mul_pow2(-2));
    if (r.sign() > 0 && disk_trap_holds(Dyadic(), Dyadic(), r, 1, c, prec, meter, nullptr))
      traps.disks.push_back({Dyadic(), Dyadic(), r, 1});
  }

  // attracting/superattracting cycle hunt: follow the critical orbit in
  // doubles, detect an approximate period, then certify a disk around the
  // landing point with ball arithmetic (robust to the c ball's radius)
  double cr = c.re().to_double(), ci = c.im().to_double();
  double x = 0, y = 0;
  const int kSettle = 3000;
  bool fled = false;
  std::vector<std::pair<double, double>> tail;
  for (int i = 0; i < kSettle; ++i) {
    double nx = x * x - y * y + cr, ny = 2 * x * y + ci;
    x = nx;
    y = ny;
    if (x * x + y * y > 16.0) {
      fled = true;
      break;
    }
    if (i >= kSettle - 64) tail.emplace_back(x, y);
  }
  if (!fled && tail.size() == 64) {
    int64_t period = 0;
    auto [ex, ey] = tail.back();
    for (int64_t p = 1; p <= 32; ++p) {
      auto [px, py] = tail[tail.size() - 1 - p];
      if (std::hypot(px - ex, py - ey) < 1e-9) {
        period = p;
        break;
      }
    }
    if (period > 0) {
      Dyadic wx = dyadic_from_double(ex, 52), wy = dyadic_from_double(ey, 52);
      for (int64_t rexp = 6; rexp <= 40; rexp += 2) {
        Dyadic r = Dyadic::scaled(1, -rexp);
        std::vector<Ball> chain;
        if (disk_trap_holds(wx, wy, r, period, c, prec, meter, &chain)) {
          traps.disks.push_back({wx, wy, r, period});
          // the chain disks also lie in K_c: their f-images funnel back
          for (const Ball& b : chain)
            traps.disks.push_back({b.re(), b.im(), b.rad(), period});
          break;
        }
      }
    }
  }

  add_point_witnesses(traps, c, meter);
  return traps;
}

bool ball_in_traps(const Ball& b, const TrapSet& traps, const Precision&) {
  if (b.is_whole_plane()) return false;
  for (const auto& t : traps.disks) {
    // cheap max-norm prefilter before the square root
    if ((b.re() - t.wx).abs() + b.rad() > t.r) continue;
    if ((b.im() - t.wy).abs() + b.rad() > t.r) continue;
    Dyadic dc = dist_upper(b.re(), b.im(), t.wx, t.wy);
    if (dc + b.rad() <= t.r) return true;
  }
  for (const auto& t : traps.rects) {
    RealInterval bx(b.re() - b.rad(), b.re() + b.rad());
    RealInterval by(b.im() - b.rad(), b.im() + b.rad());
    if (t.x.contains(bx) && t.y.contains(by)) return true;
  }
  return false;
}

BoundedCert certify_bounded(const Ball& pt, const Ball& c, const TrapSet& traps,
                            int64_t max_iter, const Precision& prec,
                            CostMeter& meter) {
  if (traps.disks.empty() && traps.rects.empty()) return {};
  Ball cur = pt;
  for (int64_t k = 0; k <= max_iter; ++k) {
    if (cur.is_whole_plane()) return {};
    // traps live inside the 2-ball; a wider enclosure can never enter one
    if (cur.rad() > Dyadic(8)) return {};
    if (ball_in_traps(cur, traps, prec)) return {true, k};
    if (k == max_iter) break;
    meter.charge(1);
    cur = ball_step(cur, c, prec);
  }
  return {};
}

bool real_window_connected(const RealInterval& c_re) {
  return Dyadic(-2) <= c_re.lo() && c_re.hi() <= Dyadic::scaled(1, -2);
}

bool connectedness_certified(const OracleDescriptor& d, const Ball& c) {
  for (const auto& [k, v] : d.fields)
    if (k == "connected_k" && v == "1") return true;
  if (c.is_whole_plane()) return false;
  // |c| <= 1/4 lies in the closed main cardioid
  return c.abs_bracket(64).hi() <= Dyadic::scaled(1, -2);
}

namespace {

enum class CellClass { escaped, bounded, unknown };

// Single certified orbit walk deciding a cover cell: trap containment and
// escape clearance are checked on the same iterates, so a cell pays one walk
// instead of two, with early exits once the enclosure can no longer certify
// anything (radius blow-out, or collapse toward the origin with no trap hit).
CellClass classify_cell(const Ball& cell, const Ball& c, const TrapSet& traps,
                        int64_t iter_cap, const Precision& prec, CostMeter& meter) {
  const bool can_trap = !traps.disks.empty() || !traps.rects.empty();
  Dyadic cu = c.abs_bracket(prec.working_bits).hi();
  Dyadic r_esc = max(Dyadic(2), cu);
  Ball cur = cell;
  for (int64_t k = 0; k <= iter_cap; ++k) {
    if (cur.is_whole_plane()) return CellClass::unknown;
    if (can_trap && ball_in_traps(cur, traps, prec)) return CellClass::bounded;
    RealInterval za = cur.abs_bracket(prec.working_bits);
    if (za.lo() > r_esc) return CellClass::escaped;
    if (k > 0 && za.lo().is_zero() && cur.rad() > r_esc.mul_pow2(2))
      return CellClass::unknown;
    // collapse toward the origin: escape is out of reach, and only a trap the
    // critical orbit reaches could still certify; without traps, give up
    if (!can_trap && k > 0 && za.hi() < Dyadic::scaled(1, -48))
      return CellClass::unknown;
    if (k == iter_cap) break;
    meter.charge(1);
    cur = ball_step(cur, c, prec);
  }
  return CellClass::unknown;
}

}  // namespace

CoverOutcome cover_region(const Dyadic& cx, const Dyadic& cy, const Dyadic& t,
                          RegionShape shape, const Ball& c, const TrapSet& traps,
                          const CoverBudget& budget, const Precision& prec,
                          CostMeter& meter) {
  CoverOutcome out;
  if (t.sign() <= 0) throw Error(Err::usage, "cover region radius must be positive");
  struct Cell {
    Dyadic x, y, hw;
  };
  Dyadic min_hw = t.mul_pow2(-budget.max_depth);
  std::deque<Cell> work;
  work.push_back({cx, cy, t});
  bool saw_escape = false, saw_bounded = false, saw_unresolved = false;
  Dyadic t2 = t * t;
  const uint64_t tick0 = meter.ticks;
  while (!work.empty()) {
    if (budget.tick_cap > 0 &&
        meter.ticks - tick0 > static_cast<uint64_t>(budget.tick_cap)) {
      out.tick_capped = true;
      saw_unresolved = true;
      break;
    }
    Cell cell = work.front();
    work.pop_front();
    if (shape == RegionShape::euclid_disk) {
      // skip cells whose closest point to the center is outside the disk
      Dyadic gx = max(Dyadic(), (cell.x - cx).abs() - cell.hw);
      Dyadic gy = max(Dyadic(), (cell.y - cy).abs() - cell.hw);
      if (gx * gx + gy * gy > t2) continue;
    }
    ++out.cells_used;
    meter.charge(1);
    if (out.cells_used > budget.max_cells) {
      out.cell_capped = true;
      saw_unresolved = true;
      break;
    }
    Ball cell_ball(cell.x, cell.y, cell.hw * sqrt2_upper());
    CellClass cc = classify_cell(cell_ball, c, traps, budget.iter_cap, prec, meter);
    if (cc == CellClass::escaped) {
      saw_escape = true;
      out.esc_x = cell.x;
      out.esc_y = cell.y;
    } else if (cc == CellClass::bounded) {
      saw_bounded = true;
      out.bnd_x = cell.x;
      out.bnd_y = cell.y;
    } else if (cell.hw > min_hw) {
      Dyadic h = cell.hw.mul_pow2(-1);
      work.push_back({cell.x - h, cell.y - h, h});
      work.push_back({cell.x + h, cell.y - h, h});
      work.push_back({cell.x - h, cell.y + h, h});
      work.push_back({cell.x + h, cell.y + h, h});
    } else {
      saw_unresolved = true;
    }
    if (saw_escape && saw_bounded) break;
  }
  out.has_pair = saw_escape && saw_bounded;
  if (out.has_pair)
    out.verdict = RegionVerdict::mixed_pair;
  else if (saw_unresolved || !work.empty())
    out.verdict = RegionVerdict::unresolved;
  else if (saw_escape && !saw_bounded)
    out.verdict = RegionVerdict::all_escaping;
  else if (saw_bounded && !saw_escape)
    out.verdict = RegionVerdict::all_bounded;
  else
    out.verdict = RegionVerdict::unresolved;  // empty region: nothing certified
  return out;
}

std::optional<std::pair<Dyadic, Dyadic>> exterior_bracket(
    const Ball& z, const Ball& c, int64_t iter_cap, const Precision& prec,
    CostMeter& meter) {
  const int64_t bits = prec.working_bits;
  OrbitPush orb = push_orbit(z, c, Dyadic::scaled(1, 10), iter_cap, prec, meter, true);
  if (!orb.reached || orb.dz_abs.lo().sign() <= 0 || orb.z_abs.lo().sign() <= 0)
    return std::nullopt;

  Dyadic cu = c.abs_bracket(bits).hi();
  RealInterval rho = orb.z_abs;
  // q bounds |c / z_j^2| for all j >= k; the orbit modulus only grows
  Dyadic q = div_dir(cu, rho.lo() * rho.lo(), bits, Round::up);
  if (!(q <= Dyadic::scaled(1, -9))) return std::nullopt;

  // Green's function: G = 2^-k log|z_k| +- 2^-k eta, eta >= sum of tails
  Dyadic eta = div_dir(q, Dyadic(1) - q, bits, Round::up);
  RealInterval G = (ilog(rho, bits) + RealInterval(-eta, eta)).mul_pow2(-orb.steps);
  if (G.lo().sign() <= 0) return std::nullopt;

  // |grad G| = |phi'/phi|: the scaled log-derivative 2^-k D_k/z_k times a
  // product over j >= k of 1/(1 + c/z_j^2), pinched by S = 2q >= sum q_j
  Dyadic S = q.mul_pow2(1);
  Dyadic Sp = div_dir(S, Dyadic(1) - q, bits, Round::up);
  Dyadic fac_lo = Dyadic(1) - S;
  Dyadic fac_hi = div_dir(Dyadic(1), Dyadic(1) - Sp, bits, Round::up);
  if (fac_lo.sign() <= 0) return std::nullopt;
  RealInterval g =
      (idiv(orb.dz_abs, rho, bits) * RealInterval(fac_lo, fac_hi)).mul_pow2(-orb.steps);
  if (g.lo().sign() <= 0) return std::nullopt;

  RealInterval W = iexp(G, bits);
  RealInterval Wm1 = iexpm1(G, bits);
  // dist >= (W-1)/(4 W g): Koebe 1/4 on the inverse uniformizer over the
  // disk of radius W-1 around the Boettcher image (it avoids infinity)
  Dyadic lower = div_dir(Wm1.lo(), (W.hi() * g.hi()).mul_pow2(2), bits, Round::down);
  // dist <= (W-1)(W+1)/(W g): Schwarz-Pick on t -> 1/phi(z + d t)
  Dyadic upper =
      div_dir(Wm1.hi() * (W.hi() + Dyadic(1)), W.lo() * g.lo(), bits, Round::up);
  if (lower.sign() < 0) lower = Dyadic();
  return std::make_pair(lower, upper);
}

std::optional<BoundedPartner> bounded_candidate_near(
    const Dyadic& zx, const Dyadic& zy, const Dyadic& t, const TrapSet& traps,
    const Precision& prec, CostMeter& meter) {
  std::optional<BoundedPartner> best;
  Dyadic best_score;
  auto consider = [&](const Dyadic& px, const Dyadic& py, const Dyadic& slack) {
    Dyadic score = dist_upper(px, py, zx, zy) + slack;
    if (score > t) return;
    if (!best || score < best_score) {
      best = BoundedPartner{px, py, slack};
      best_score = score;
    }
  };

  for (const auto& tr : traps.rects) {
    meter.charge(1);
    Dyadic px = min(max(zx, tr.x.lo()), tr.x.hi());
    Dyadic py = min(max(zy, tr.y.lo()), tr.y.hi());
    if (ball_in_traps(Ball(px, py), traps, prec)) consider(px, py, Dyadic());
  }
  for (const auto& tr : traps.disks) {
    meter.charge(1);
    if (ball_in_traps(Ball(zx, zy), traps, prec)) {
      consider(zx, zy, Dyadic());
      break;  // z itself is a perfect partner
    }
    double dx = zx.to_double() - tr.wx.to_double();
    double dy = zy.to_double() - tr.wy.to_double();
    double L = std::hypot(dx, dy);
    if (L == 0) continue;
    // aim just inside the trap boundary toward z, deepest inset first; the
    // exact trap test is the certificate, the aim is only a heuristic
    for (int inset_exp : {13, 10, 7, 4}) {
      double scale = (1.0 - std::ldexp(1.0, -inset_exp)) * tr.r.to_double() / L;
      Dyadic px = dyadic_from_double(tr.wx.to_double() + dx * scale, 60);
      Dyadic py = dyadic_from_double(tr.wy.to_double() + dy * scale, 60);
      if (ball_in_traps(Ball(px, py), traps, prec)) {
        consider(px, py, Dyadic());
        break;
      }
    }
  }
  if (!traps.witnesses.empty()) meter.charge(1);
  for (const auto& w : traps.witnesses) consider(w.wx, w.wy, w.r);
  return best;
}

std::optional<std::pair<Dyadic, Dyadic>> escaping_candidate_near(
    const Dyadic& zx, const Dyadic& zy, const Dyadic& t, const Ball& c,
    const TrapSet& traps, int64_t iter_cap, const Precision& prec,
    CostMeter& meter) {
  if (t.sign() <= 0) return std::nullopt;
  meter.charge(1);
  const double kPi = 3.14159265358979323846;
  double zx0 = zx.to_double(), zy0 = zy.to_double(), t0 = t.to_double();
  // outer radii first: the tighter the ring, the tighter the caller's upper;
  // the outermost sits a hair inside t so snapping keeps probes admissible
  const double factors[5] = {0.999999, 63.0 / 64.0, 7.0 / 8.0, 3.0 / 4.0, 1.0 / 2.0};
  for (double f : factors) {
    for (int k = 0; k < 16; ++k) {
      double ang = kPi * k / 8.0;
      Dyadic px = dyadic_from_double(zx0 + f * t0 * std::cos(ang), 60);
      Dyadic py = dyadic_from_double(zy0 + f * t0 * std::sin(ang), 60);
      if (dist_upper(px, py, zx, zy) > t) continue;
      if (ball_in_traps(Ball(px, py), traps, prec)) continue;
      EscapeResult er = certify_escape(Ball(px, py), c, iter_cap, prec, meter);
      if (er.status == EscapeStatus::escaped) return std::make_pair(px, py);
    }
  }
  return std::nullopt;
}

DistanceBracket distance_estimate(const DyadicPoint& z, OracleTape& oracle,
                                  CostMeter& meter, int64_t target_n,
                                  int64_t budget) {
  if (target_n < 0) throw Error(Err::usage, "target_n must be >= 0");
  if (budget < 0) throw Error(Err::usage, "budget must be >= 0");
  const Precision prec(96);
  const uint64_t start = meter.ticks;
  auto spent = [&]() { return static_cast<int64_t>(meter.ticks - start); };

  DistanceBracket widest;  // [0, +inf), the always-valid answer
  widest.undecided = true;
  if (budget == 0) return widest;

  DistanceBracket br;
  br.undecided = true;

  // unconditional far-field bounds from J_c inside the closed 2-ball
  Dyadic norm2 = z.x * z.x + z.y * z.y;
  Dyadic lo1 = max(z.x.abs(), z.y.abs()) - Dyadic(2);
  Dyadic lo2 = sqrt_lower(norm2, 64) - Dyadic(2);
  br.lower = max(Dyadic(), max(lo1, lo2));
  br.upper = sqrt_upper(norm2, 64) + Dyadic(2);
  br.upper_infinite = false;

  Dyadic goal = Dyadic::scaled(1, -target_n);
  const int64_t m_cap = 4 * target_n + 64;

  Ball zball(z.x, z.y);
  int64_t m = target_n + 8;
  Ball cball = oracle.c_ball(m, meter);
  bool connected = connectedness_certified(oracle.descriptor(), cball);
  TrapSet traps = find_traps(cball, prec, meter);

  // classify the query point itself
  EscapeResult zesc =
      certify_escape(zball, cball, std::min<int64_t>(budget, 192 + 16 * target_n), prec, meter);
  bool z_escaped = zesc.status == EscapeStatus::escaped;
  bool z_bounded = false;
  if (!z_escaped)
    z_bounded =
        certify_bounded(zball, cball, traps, std::min<int64_t>(budget, 384), prec, meter).bounded;

  // exterior bracket with an escalating oracle precision schedule; stop when
  // the bracket is orbit-limited (unchanged by more parameter bits)
  if (z_escaped && connected) {
    Dyadic prev_width;
    bool have_prev = false;
    while (spent() < budget) {
      int64_t cap = std::min<int64_t>(budget - spent(), 200000);
      auto kb = exterior_bracket(zball, cball, cap, prec, meter);
      if (kb) {
        br.lower = max(br.lower, kb->first);
        br.upper = min(br.upper, kb->second);
        if (br.upper - br.lower <= goal) {
          br.undecided = false;
          return br;
        }
        Dyadic w = kb->second - kb->first;
        if (have_prev && w.mul_pow2(4) > prev_width * Dyadic(15)) break;
        prev_width = w;
        have_prev = true;
      }
      if (m >= m_cap) break;
      m = std::min<int64_t>(m * 2, m_cap);
      cball = oracle.c_ball(m, meter);
    }
  }

  // pair partners need witness slack well under the goal: refine the oracle
  // (doubling schedule) so witness enclosures shrink to ~2^-(2n+20)
  int64_t m_need = std::min<int64_t>(std::max<int64_t>(2 * target_n + 24, 48), m_cap);
  if (spent() < budget && cball.rad() > Dyadic::scaled(1, -(m_need - 1))) {
    while (m < m_need) m = std::min<int64_t>(m * 2, m_cap);
    cball = oracle.c_ball(m, meter);
    traps = find_traps(cball, prec, meter);
  }

  // upper tightening: a certified escaping/bounded pair pins dist from above
  if (spent() < budget) {
    if (z_escaped) {
      auto cand = bounded_candidate_near(z.x, z.y, br.upper, traps, prec, meter);
      if (cand)
        br.upper =
            min(br.upper, dist_upper(z.x, z.y, cand->bx, cand->by) + cand->slack);
    } else if (!z_bounded) {
      // neither side certified: only a full pair pins the boundary here; for
      // a bounded z the refinement loop finds escapers round by round
      int64_t ecap = std::min<int64_t>(budget - spent(), 192 + 8 * target_n);
      auto ecand =
          escaping_candidate_near(z.x, z.y, br.upper, cball, traps, ecap, prec, meter);
      if (ecand) {
        Dyadic ed = dist_upper(z.x, z.y, ecand->first, ecand->second);
        auto cand = bounded_candidate_near(z.x, z.y, br.upper, traps, prec, meter);
        if (cand)
          br.upper = min(br.upper,
                         max(ed, dist_upper(z.x, z.y, cand->bx, cand->by) + cand->slack));
      }
    }
  }

  // lower refinement: covers of the disk of radius t certify dist > t when
  // uniform, or pin the upper to t when mixed. Aim just under the goal from
  // the top while that keeps succeeding; bisect when the top is mixed.
  int64_t iter_cap = 512;
  int strikes = 0;
  bool try_top = true;
  Dyadic seven_eighths = goal - goal.mul_pow2(-3);
  for (int round = 0; round < 96 && spent() < budget; ++round) {
    if (br.upper - br.lower <= goal) {
      br.undecided = false;
      return br;
    }
    Dyadic t = try_top ? br.upper - seven_eighths
                       : (br.lower + br.upper).mul_pow2(-1);
    if (t <= br.lower || t.sign() <= 0) break;
    // mixed-certificate shortcut: z itself is a bounded witness, so one
    // certified escaper within t pins the upper with no cover at all
    if (z_bounded) {
      int64_t ecap = std::min<int64_t>(budget - spent(), 2 * target_n + 64);
      std::optional<std::pair<Dyadic, Dyadic>> e;
      if (ecap > 0)
        e = escaping_candidate_near(z.x, z.y, t, cball, traps, ecap, prec, meter);
      if (e) {
        br.upper = min(br.upper, dist_upper(z.x, z.y, e->first, e->second));
        try_top = false;
        continue;
      }
    }
    CoverBudget cb;
    cb.iter_cap = iter_cap;
    cb.tick_cap = budget - spent();
    CoverOutcome co = cover_region(z.x, z.y, t, RegionShape::euclid_disk, cball,
                                   traps, cb, prec, meter);
    if (co.verdict == RegionVerdict::all_escaping ||
        co.verdict == RegionVerdict::all_bounded) {
      br.lower = max(br.lower, t);
      try_top = true;
    } else if (co.verdict == RegionVerdict::mixed_pair) {
      br.upper = min(br.upper, t);
      if (z_escaped)
        br.upper = min(br.upper, dist_upper(z.x, z.y, co.bnd_x, co.bnd_y));
      else if (z_bounded)
        br.upper = min(br.upper, dist_upper(z.x, z.y, co.esc_x, co.esc_y));
      try_top = false;
    } else if (co.tick_capped) {
      break;  // the budget died inside the cover
    } else if (co.cell_capped) {
      // a stalled boundary cover; move t rather than iterate harder
      if (++strikes >= 3) break;
      try_top = !try_top;
    } else {
      if (iter_cap >= 8192) break;
      iter_cap *= 4;
    }
  }
  if (br.lower > br.upper)
    throw Error(Err::internal, "distance bracket certificates disagree");
  br.undecided = br.upper - br.lower > goal;
  if (br.undecided && spent() >= budget) return widest;
  return br;
}

}  // namespace jc
