#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tsimp/series.hpp"

namespace tsimp {

/// MCAR simulation parameters: fraction of slots hidden, and the seed that
/// makes the draw reproducible.
struct MissingSpec {
  double rate = 0.0;
  std::uint64_t seed = 0;
};

struct MaskedSeries {
  TimeSeries corrupted;          // hidden slots flagged missing, value NaN
  TimeSeries ground_truth;       // the original complete series
  std::vector<std::size_t> sim_mask;  // hidden slot indices, ascending
};

struct MaskStats {
  std::size_t hidden_count = 0;
  double achieved_rate = 0.0;
  std::size_t longest_gap = 0;   // longest run of hidden epochs per channel
};

/// Hide exactly round(rate * T_i * d) slots, chosen uniformly without
/// replacement. Deterministic for a fixed (series, spec).
MaskedSeries simulate_mcar(const TimeSeries& series, const MissingSpec& spec);

MaskStats mask_stats(const MaskedSeries& masked);

}  // namespace tsimp
