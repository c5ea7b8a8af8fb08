#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tsimp/missing.hpp"
#include "tsimp/rng.hpp"
#include "tsimp/series.hpp"

namespace testutil {

inline tsimp::TimeSeries make_series(const std::vector<double>& values,
                                     const std::string& id = "s",
                                     int label = 0) {
  tsimp::TimeSeries s(id, values.size(), 1, label);
  for (std::size_t t = 0; t < values.size(); ++t) s.set(t, 0, values[t]);
  return s;
}

// NaN entries mark holes.
inline tsimp::TimeSeries make_series_with_holes(
    const std::vector<double>& values, const std::string& id = "s",
    int label = 0) {
  tsimp::TimeSeries s(id, values.size(), 1, label);
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (std::isnan(values[t]))
      s.set_missing(t, 0);
    else
      s.set(t, 0, values[t]);
  }
  return s;
}

// Noisy sine with the given period; the synthetic signal used throughout
// the benchmark-shaped tests.
inline tsimp::TimeSeries make_sine_series(const std::string& id,
                                          std::size_t length,
                                          std::size_t period, double amplitude,
                                          double noise_sigma,
                                          std::uint64_t seed, int label = 0) {
  tsimp::Rng rng(seed);
  tsimp::TimeSeries s(id, length, 1, label);
  for (std::size_t t = 0; t < length; ++t) {
    const double phase = 2.0 * 3.14159265358979323846 *
                         static_cast<double>(t % period) /
                         static_cast<double>(period);
    s.set(t, 0, amplitude * std::sin(phase) + noise_sigma * rng.next_gaussian());
  }
  return s;
}

// Noisy sine with a random per-period amplitude envelope, so epochs within
// one period are genuinely correlated (like day-to-day activity variation).
inline tsimp::TimeSeries make_modulated_series(const std::string& id,
                                               std::size_t length,
                                               std::size_t period,
                                               double amplitude,
                                               double noise_sigma,
                                               std::uint64_t seed,
                                               int label = 0) {
  tsimp::Rng rng(seed);
  tsimp::TimeSeries s(id, length, 1, label);
  double envelope = 1.0;
  for (std::size_t t = 0; t < length; ++t) {
    if (t % period == 0) envelope = rng.next_uniform(0.5, 1.5);
    const double phase = 2.0 * 3.14159265358979323846 *
                         static_cast<double>(t % period) /
                         static_cast<double>(period);
    s.set(t, 0,
          amplitude * envelope * std::sin(phase) +
              noise_sigma * rng.next_gaussian());
  }
  return s;
}

// Two-class synthetic benchmark dataset: class 1 has a larger amplitude,
// which separates the per-series std feature.
inline tsimp::Dataset make_sine_dataset(std::size_t n_series,
                                        std::size_t length, std::size_t period,
                                        double noise_sigma,
                                        std::uint64_t seed) {
  tsimp::Dataset d;
  d.name = "synthetic";
  for (std::size_t i = 0; i < n_series; ++i) {
    const int label = i % 2 == 0 ? 0 : 1;
    const double amplitude = label == 0 ? 1.0 : 2.0;
    d.series.push_back(make_modulated_series(
        "series_" + std::to_string(i), length, period, amplitude, noise_sigma,
        tsimp::derive_seed(seed, i), label));
  }
  return d;
}

}  // namespace testutil
