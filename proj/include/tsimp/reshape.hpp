#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tsimp/error.hpp"

namespace tsimp {

enum class PadPolicy { Strict, Pad };

/// Period used to fold one channel of a series into a rows-are-periods,
/// columns-are-phases matrix. Strict mode demands t_period | T_i.
struct ReshapeSpec {
  std::size_t t_period = 1;
  PadPolicy pad_policy = PadPolicy::Strict;
};

enum class CellFlag : std::uint8_t { Observed = 0, Missing = 1, Padding = 2 };

/// One reshaped channel: k x t_period cells, row-major. Padding cells, if
/// any, sit at the tail of the last row and are excluded from everything.
struct SeriesMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t original_len = 0;
  std::vector<double> cells;      // rows * cols
  std::vector<CellFlag> flags;    // rows * cols

  double& at(std::size_t r, std::size_t c) { return cells[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return cells[r * cols + c]; }
  CellFlag& flag(std::size_t r, std::size_t c) { return flags[r * cols + c]; }
  CellFlag flag(std::size_t r, std::size_t c) const {
    return flags[r * cols + c];
  }
};

enum class PeriodFit { Valid, PadNeeded, Invalid };

/// Valid iff t_period divides t_i; PadNeeded iff t_period <= t_i without
/// dividing it; Invalid iff t_period > t_i.
PeriodFit validate_period(std::size_t t_i, std::size_t t_period);

/// Fold one channel (values + observed flags) into a SeriesMatrix.
/// Element (r, c) is epoch r * t_period + c of the input.
SeriesMatrix reshape_to_matrix(const std::vector<double>& values,
                               const std::vector<std::uint8_t>& observed,
                               const ReshapeSpec& spec);

/// Row-major flatten with padding cells dropped; exact inverse of
/// reshape_to_matrix.
void reshape_to_series(const SeriesMatrix& matrix, std::vector<double>& values,
                       std::vector<std::uint8_t>& observed);

}  // namespace tsimp
