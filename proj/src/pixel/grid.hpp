// Three-state certified renders on the dyadic pixel lattice, PGM export, and
// worst-case tick measurement over size-n inputs.
#pragma once

#include "pixel/decide.hpp"

#include <functional>
#include <string>
#include <vector>

namespace jc {

// In: certified dist(q, J_c) < 2^-n. Out: certified dist(q, J_c) > 2*2^-n.
// Ambiguous: the decision procedure answered without a full certificate.
enum class CellState : uint8_t { in, out, ambiguous };

struct GridRegion {
  Dyadic x_lo, x_hi, y_lo, y_hi;
};

struct GridImage {
  GridRegion region;
  int64_t n = 0;
  int64_t ix0 = 0, iy0 = 0;  // lattice indices (units of 2^-n) of cell (0, 0)
  int64_t nx = 0, ny = 0;
  std::vector<CellState> cells;  // row-major, y increasing
  // Per-cell certificate method (index into method_names). Together with the
  // deterministic decision procedure this makes every In/Out cell replayable:
  // rerunning decide_pixel at (cell, n) reproduces bit, method, and witnesses.
  std::vector<uint8_t> cell_method;
  int64_t count_in = 0, count_out = 0, count_ambiguous = 0;
  uint64_t setup_ticks = 0;  // shared oracle query + trap construction cost
  uint64_t max_cell_ticks = 0;
  uint64_t total_ticks = 0;
  uint64_t max_oracle_precision = 0;
  std::map<std::string, int64_t> method_counts;

  CellState at(int64_t i, int64_t j) const { return cells[size_t(j * nx + i)]; }
  Dyadic cell_x(int64_t i) const { return Dyadic::scaled(long(ix0 + i), -n); }
  Dyadic cell_y(int64_t j) const { return Dyadic::scaled(long(iy0 + j), -n); }

  static const std::vector<std::string>& method_names();
  static uint8_t method_index(const std::string& name);
};

// Decides every size-n lattice point whose coordinates lie in the closed
// region. Deterministic in the oracle's answers; cells map from the pixel
// answers as In = (1, certified_near), Out = (0, certified_far), else
// Ambiguous, which keeps both error directions one-sided certified.
GridImage render_grid(const GridRegion& region, int64_t n, OracleTape& oracle,
                      const DecideLimits* limits = nullptr);

// 8-bit PGM (P5): In = 0, Ambiguous = 128, Out = 255; rows top to bottom.
void write_pgm(const GridImage& img, const std::string& path);

// any per-pixel procedure whose ticks should be measured
using PixelProc = std::function<void(const DyadicPoint&, CostMeter&)>;

struct TickMeasurement {
  uint64_t max_ticks = 0;
  int64_t points = 0;
  bool sampled = false;  // true when the lattice was subsampled
  Dyadic arg_x, arg_y;   // a point attaining the maximum
};

// Worst-case ticks of `proc` over size-n dyadic points with |q| <= 2C
// (Euclidean). Exhaustive up to n = exhaustive_limit; beyond that a
// deterministic pseudorandom sample of sample_count lattice points.
TickMeasurement measure_T(const PixelProc& proc, int64_t n, int64_t C,
                          int64_t exhaustive_limit = 8, int64_t sample_count = 20000,
                          uint64_t seed = 0x6a633131u);

}  // namespace jc
