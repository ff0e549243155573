#include "pixel/grid.hpp"

#include <fstream>
#include <random>

namespace jc {

namespace {

// index of the lattice point obtained by rounding v onto the 2^-n grid
int64_t lattice_int(const Dyadic& v, int64_t n, Round mode) {
  Dyadic g = v.round_to_grid(n, mode).mul_pow2(n);
  if (g.is_zero()) return 0;
  mpz_class m = g.mantissa() << size_t(g.exponent());
  if (!m.fits_slong_p()) throw Error(Err::usage, "grid region is too large");
  return m.get_si();
}

}  // namespace

const std::vector<std::string>& GridImage::method_names() {
  static const std::vector<std::string> names = {
      "none",           "far_field",    "koebe", "cover_escaping",
      "cover_bounded",  "pair",         "fallback"};
  return names;
}

uint8_t GridImage::method_index(const std::string& name) {
  const auto& names = method_names();
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return uint8_t(i);
  return 0;
}

GridImage render_grid(const GridRegion& region, int64_t n, OracleTape& oracle,
                      const DecideLimits* limits) {
  if (n < 1) throw Error(Err::usage, "resolution must be >= 1");

  GridImage img;
  img.region = region;
  img.n = n;
  // a region holding no lattice point renders as an empty image
  if (region.x_lo > region.x_hi || region.y_lo > region.y_hi) {
    img.nx = img.ny = 0;
    return img;
  }
  img.ix0 = lattice_int(region.x_lo, n, Round::up);
  img.iy0 = lattice_int(region.y_lo, n, Round::up);
  int64_t ix1 = lattice_int(region.x_hi, n, Round::down);
  int64_t iy1 = lattice_int(region.y_hi, n, Round::down);
  img.nx = std::max<int64_t>(int64_t(0), ix1 - img.ix0 + 1);
  img.ny = std::max<int64_t>(int64_t(0), iy1 - img.iy0 + 1);
  if (img.nx == 0 || img.ny == 0) {
    img.nx = img.ny = 0;
    return img;
  }
  img.cells.assign(size_t(img.nx) * size_t(img.ny), CellState::ambiguous);
  img.cell_method.assign(img.cells.size(), 0);

  // shared caches; the acquisition cost is reported once as setup instead of
  // being charged to whichever pixel happens to run first
  DecideContext ctx;
  {
    CostMeter setup;
    const Precision wp = decide_working_precision(n);
    for (int64_t m : {decide_oracle_precision(n), decide_partner_precision(n)}) {
      const Ball& cb = ctx.cballs.emplace(m, oracle.c_ball(m, setup)).first->second;
      ctx.traps.emplace(m, find_traps(cb, wp, setup));
    }
    ctx.connected_value =
        connectedness_certified(oracle.descriptor(), ctx.cballs.begin()->second);
    ctx.connected_known = true;
    img.setup_ticks = setup.ticks;
    img.max_oracle_precision = setup.max_precision;
  }

  for (int64_t j = 0; j < img.ny; ++j) {
    Dyadic py = img.cell_y(j);
    for (int64_t i = 0; i < img.nx; ++i) {
      CostMeter meter;
      PixelQuery q(DyadicPoint(img.cell_x(i), py, n), n);
      PixelAnswer a = decide_pixel(q, oracle, meter, &ctx, limits);
      CellState s;
      if (a.bit == 1)
        s = a.provenance == Provenance::certified_near ? CellState::in : CellState::ambiguous;
      else
        s = a.provenance == Provenance::certified_far ? CellState::out : CellState::ambiguous;
      img.cells[size_t(j * img.nx + i)] = s;
      img.cell_method[size_t(j * img.nx + i)] = GridImage::method_index(a.record.method);
      if (s == CellState::in)
        ++img.count_in;
      else if (s == CellState::out)
        ++img.count_out;
      else
        ++img.count_ambiguous;
      ++img.method_counts[a.record.method];
      img.total_ticks += meter.ticks;
      if (meter.ticks > img.max_cell_ticks) img.max_cell_ticks = meter.ticks;
      if (meter.max_precision > img.max_oracle_precision)
        img.max_oracle_precision = meter.max_precision;
    }
  }
  img.total_ticks += img.setup_ticks;
  return img;
}

void write_pgm(const GridImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Err::usage, "cannot open for writing: " + path);
  out << "P5\n" << img.nx << " " << img.ny << "\n255\n";
  for (int64_t j = img.ny - 1; j >= 0; --j) {
    for (int64_t i = 0; i < img.nx; ++i) {
      CellState s = img.at(i, j);
      out.put(s == CellState::in ? char(0) : (s == CellState::out ? char(255) : char(128)));
    }
  }
  out.flush();
  if (!out) throw Error(Err::internal, "short write: " + path);
}

TickMeasurement measure_T(const PixelProc& proc, int64_t n, int64_t C,
                          int64_t exhaustive_limit, int64_t sample_count, uint64_t seed) {
  if (n < 1 || C < 1) throw Error(Err::usage, "measure_T needs n >= 1 and C >= 1");
  TickMeasurement res;
  const int64_t R = (int64_t(2) * C) << n;  // lattice units of 2^-n
  const mpz_class R2 = mpz_class(R) * R;

  auto run_point = [&](int64_t a, int64_t b) {
    DyadicPoint p(Dyadic::scaled(long(a), -n), Dyadic::scaled(long(b), -n), n);
    CostMeter meter;
    proc(p, meter);
    ++res.points;
    if (meter.ticks > res.max_ticks) {
      res.max_ticks = meter.ticks;
      res.arg_x = p.x;
      res.arg_y = p.y;
    }
  };

  if (n <= exhaustive_limit) {
    for (int64_t a = -R; a <= R; ++a) {
      mpz_class rem = R2 - mpz_class(a) * a;
      mpz_class s;
      mpz_sqrt(s.get_mpz_t(), rem.get_mpz_t());
      int64_t bmax = s.get_si();
      for (int64_t b = -bmax; b <= bmax; ++b) run_point(a, b);
    }
  } else {
    res.sampled = true;
    std::mt19937_64 eng(seed ^ (uint64_t(n) << 32) ^ uint64_t(C));
    const uint64_t span = uint64_t(2 * R + 1);
    int64_t kept = 0;
    while (kept < sample_count) {
      int64_t a = int64_t(eng() % span) - R;
      int64_t b = int64_t(eng() % span) - R;
      if (mpz_class(a) * a + mpz_class(b) * b > R2) continue;
      run_point(a, b);
      ++kept;
    }
  }
  return res;
}

}  // namespace jc
