#include "tsimp/missing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsimp/rng.hpp"

namespace tsimp {

MaskedSeries simulate_mcar(const TimeSeries& series, const MissingSpec& spec) {
  if (!series.is_complete())
    throw PreexistingMissing("series '" + series.id() +
                             "' already contains missing entries");
  if (!(spec.rate >= 0.0 && spec.rate <= 0.95))
    throw RateOutOfRange("missing rate must lie in [0, 0.95], got " +
                         std::to_string(spec.rate));

  const std::size_t slots = series.slot_count();
  // Round half up so counts are bit-reproducible.
  const auto hide =
      static_cast<std::size_t>(std::floor(spec.rate * static_cast<double>(slots) + 0.5));

  std::vector<std::size_t> pool(slots);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  Rng rng(spec.seed);
  for (std::size_t i = 0; i < hide; ++i) {
    const std::size_t j = i + rng.next_below(slots - i);
    std::swap(pool[i], pool[j]);
  }

  MaskedSeries out;
  out.ground_truth = series;
  out.corrupted = series;
  out.sim_mask.assign(pool.begin(), pool.begin() + hide);
  std::sort(out.sim_mask.begin(), out.sim_mask.end());
  const std::size_t d = series.channels();
  for (std::size_t slot : out.sim_mask)
    out.corrupted.set_missing(slot / d, slot % d);
  return out;
}

MaskStats mask_stats(const MaskedSeries& masked) {
  MaskStats stats;
  stats.hidden_count = masked.sim_mask.size();
  const std::size_t slots = masked.corrupted.slot_count();
  stats.achieved_rate =
      slots == 0 ? 0.0
                 : static_cast<double>(stats.hidden_count) /
                       static_cast<double>(slots);
  const std::size_t d = masked.corrupted.channels();
  const std::size_t t = masked.corrupted.length();
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t run = 0;
    for (std::size_t i = 0; i < t; ++i) {
      if (!masked.corrupted.is_observed(i, c)) {
        ++run;
        stats.longest_gap = std::max(stats.longest_gap, run);
      } else {
        run = 0;
      }
    }
  }
  return stats;
}

}  // namespace tsimp
