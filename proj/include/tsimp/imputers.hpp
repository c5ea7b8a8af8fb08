#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsimp/forest.hpp"
#include "tsimp/reshape.hpp"
#include "tsimp/series.hpp"

namespace tsimp {

enum class ImputeMethod { MiceRf, Mean, Locf, Linear, Knn };

ImputeMethod parse_method(const std::string& name);
std::string method_name(ImputeMethod method);

struct ImputationConfig {
  ImputeMethod method = ImputeMethod::MiceRf;
  std::optional<std::size_t> t_period;  // univariate mice_rf / knn only
  int max_iter = 5;
  ForestParams forest;
  std::size_t knn_k = 5;
  std::uint64_t seed = 0;
  int n_chains = 1;  // independent MICE chains averaged together
};

struct ImputationResult {
  TimeSeries imputed;
  // Mean absolute cell update per chained-equation round (mice_rf only).
  std::vector<double> method_trace;
};

/// Column-mean initialization; fully missing columns fall back to the global
/// observed mean. Padding cells are untouched.
SeriesMatrix initial_fill(const SeriesMatrix& matrix);

/// Chained-equation imputation with a random-forest regressor per column.
/// Columns with missing cells are visited in ascending order of missing
/// count for exactly config.max_iter rounds; observed cells never change.
SeriesMatrix mice_impute(const SeriesMatrix& matrix,
                         const ImputationConfig& config,
                         std::vector<double>* trace = nullptr);

/// Dispatch on config.method. Univariate mice_rf folds the series by
/// t_period first and unfolds afterwards; multivariate input is imputed on
/// its epochs-by-channels grid without reshaping.
ImputationResult impute_series(const TimeSeries& series,
                               const ImputationConfig& config);

ImputationResult impute_mean(const TimeSeries& series);
ImputationResult impute_locf(const TimeSeries& series);
ImputationResult impute_linear(const TimeSeries& series);
ImputationResult impute_knn(const TimeSeries& series,
                            const ImputationConfig& config);

}  // namespace tsimp
