#include "tsimp/imputers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tsimp {

ImputeMethod parse_method(const std::string& name) {
  if (name == "mice_rf") return ImputeMethod::MiceRf;
  if (name == "mean") return ImputeMethod::Mean;
  if (name == "locf") return ImputeMethod::Locf;
  if (name == "linear") return ImputeMethod::Linear;
  if (name == "knn") return ImputeMethod::Knn;
  throw UsageError("unknown method '" + name +
                   "'; valid methods: mice_rf, mean, locf, linear, knn");
}

std::string method_name(ImputeMethod method) {
  switch (method) {
    case ImputeMethod::MiceRf: return "mice_rf";
    case ImputeMethod::Mean: return "mean";
    case ImputeMethod::Locf: return "locf";
    case ImputeMethod::Linear: return "linear";
    case ImputeMethod::Knn: return "knn";
  }
  return "?";
}

namespace {

// Single-channel helpers shared by the baselines and the padding post-step.

void fill_linear(std::vector<double>& values,
                 std::vector<std::uint8_t>& observed) {
  const std::size_t n = values.size();
  std::vector<std::size_t> known;
  for (std::size_t i = 0; i < n; ++i)
    if (observed[i]) known.push_back(i);
  if (known.empty()) throw AllMissing("linear interpolation: no observed value");
  for (std::size_t i = 0; i < n; ++i) {
    if (observed[i]) continue;
    const auto next = std::lower_bound(known.begin(), known.end(), i);
    if (next == known.begin()) {
      values[i] = values[known.front()];
    } else if (next == known.end()) {
      values[i] = values[known.back()];
    } else {
      const std::size_t hi = *next;
      const std::size_t lo = *(next - 1);
      const double w = static_cast<double>(i - lo) /
                       static_cast<double>(hi - lo);
      values[i] = values[lo] + w * (values[hi] - values[lo]);
    }
  }
  std::fill(observed.begin(), observed.end(), std::uint8_t{1});
}

void fill_locf(std::vector<double>& values,
               std::vector<std::uint8_t>& observed) {
  const std::size_t n = values.size();
  std::size_t first = n;
  for (std::size_t i = 0; i < n; ++i)
    if (observed[i]) { first = i; break; }
  if (first == n) throw AllMissing("locf: no observed value");
  double carry = values[first];
  for (std::size_t i = 0; i < n; ++i) {
    if (observed[i])
      carry = values[i];
    else
      values[i] = carry;  // leading holes take the first observed value
  }
  std::fill(observed.begin(), observed.end(), std::uint8_t{1});
}

void fill_mean(std::vector<double>& values,
               std::vector<std::uint8_t>& observed) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (observed[i]) { sum += values[i]; ++count; }
  if (count == 0) throw AllMissing("mean imputer: no observed value");
  const double mean = sum / static_cast<double>(count);
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!observed[i]) values[i] = mean;
  std::fill(observed.begin(), observed.end(), std::uint8_t{1});
}

void extract_channel(const TimeSeries& s, std::size_t c,
                     std::vector<double>& values,
                     std::vector<std::uint8_t>& observed) {
  values.resize(s.length());
  observed.resize(s.length());
  for (std::size_t t = 0; t < s.length(); ++t) {
    values[t] = s.value(t, c);
    observed[t] = s.is_observed(t, c) ? 1 : 0;
  }
}

TimeSeries complete_copy(const TimeSeries& s) {
  TimeSeries out(s.id(), s.length(), s.channels(), s.label());
  for (std::size_t t = 0; t < s.length(); ++t)
    for (std::size_t c = 0; c < s.channels(); ++c)
      out.set(t, c, s.value(t, c));
  return out;
}

ImputationResult per_channel_impute(
    const TimeSeries& series,
    void (*fill)(std::vector<double>&, std::vector<std::uint8_t>&)) {
  TimeSeries out = complete_copy(series);
  std::vector<double> values;
  std::vector<std::uint8_t> observed;
  for (std::size_t c = 0; c < series.channels(); ++c) {
    extract_channel(series, c, values, observed);
    fill(values, observed);
    for (std::size_t t = 0; t < series.length(); ++t)
      out.set(t, c, values[t]);
  }
  return {std::move(out), {}};
}

// Build a series-shaped matrix for the no-reshape (multivariate) path:
// rows are epochs, columns are channels.
SeriesMatrix grid_matrix(const TimeSeries& s) {
  SeriesMatrix m;
  m.rows = s.length();
  m.cols = s.channels();
  m.original_len = s.slot_count();
  m.cells = s.raw_values();
  m.flags.resize(m.cells.size());
  for (std::size_t i = 0; i < m.flags.size(); ++i)
    m.flags[i] = s.observed_at_slot(i) ? CellFlag::Observed : CellFlag::Missing;
  return m;
}

double global_observed_mean(const SeriesMatrix& m) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < m.cells.size(); ++i)
    if (m.flags[i] == CellFlag::Observed) { sum += m.cells[i]; ++count; }
  if (count == 0) throw AllMissing("matrix has no observed cell");
  return sum / static_cast<double>(count);
}

}  // namespace

SeriesMatrix initial_fill(const SeriesMatrix& matrix) {
  SeriesMatrix out = matrix;
  const double global_mean = global_observed_mean(matrix);
  for (std::size_t c = 0; c < out.cols; ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t r = 0; r < out.rows; ++r)
      if (out.flag(r, c) == CellFlag::Observed) {
        sum += out.at(r, c);
        ++count;
      }
    const double fill = count > 0 ? sum / static_cast<double>(count)
                                  : global_mean;
    for (std::size_t r = 0; r < out.rows; ++r)
      if (out.flag(r, c) == CellFlag::Missing) out.at(r, c) = fill;
  }
  return out;
}

SeriesMatrix mice_impute(const SeriesMatrix& matrix,
                         const ImputationConfig& config,
                         std::vector<double>* trace) {
  if (matrix.cols < 2)
    throw SingleColumn("mice_impute: chained equations need >= 2 columns");

  // Rows containing padding cells stay out of fitting and prediction; their
  // holes are resolved downstream on the flattened series.
  std::vector<std::size_t> rows_used;
  for (std::size_t r = 0; r < matrix.rows; ++r) {
    bool has_padding = false;
    for (std::size_t c = 0; c < matrix.cols; ++c)
      if (matrix.flag(r, c) == CellFlag::Padding) has_padding = true;
    if (!has_padding) rows_used.push_back(r);
  }

  struct ColumnWork {
    std::size_t col;
    std::size_t missing;
  };
  std::vector<ColumnWork> work;
  for (std::size_t c = 0; c < matrix.cols; ++c) {
    std::size_t missing = 0;
    for (std::size_t r : rows_used)
      if (matrix.flag(r, c) == CellFlag::Missing) ++missing;
    if (missing > 0) work.push_back({c, missing});
  }
  std::stable_sort(work.begin(), work.end(),
                   [](const ColumnWork& a, const ColumnWork& b) {
                     return a.missing < b.missing;
                   });

  const SeriesMatrix start = initial_fill(matrix);
  const int chains = std::max(1, config.n_chains);
  SeriesMatrix accum = start;
  std::vector<double> chain_sum(matrix.cells.size(), 0.0);

  for (int chain = 0; chain < chains; ++chain) {
    SeriesMatrix m = start;
    const std::uint64_t chain_seed =
        chain == 0 ? config.seed
                   : derive_seed(config.seed, static_cast<std::uint64_t>(chain));

    std::vector<double> x_train, y_train, x_query;
    const std::size_t p = matrix.cols - 1;
    for (int iter = 0; iter < config.max_iter; ++iter) {
      double update_sum = 0.0;
      std::size_t update_count = 0;
      for (const ColumnWork& w : work) {
        x_train.clear();
        y_train.clear();
        std::vector<std::size_t> predict_rows;
        for (std::size_t r : rows_used) {
          if (matrix.flag(r, w.col) == CellFlag::Observed) {
            for (std::size_t c = 0; c < matrix.cols; ++c)
              if (c != w.col) x_train.push_back(m.at(r, c));
            y_train.push_back(m.at(r, w.col));
          } else if (matrix.flag(r, w.col) == CellFlag::Missing) {
            predict_rows.push_back(r);
          }
        }
        if (y_train.empty() || predict_rows.empty()) continue;

        ForestParams fp = config.forest;
        fp.seed = derive_seed(chain_seed, static_cast<std::uint64_t>(iter),
                              static_cast<std::uint64_t>(w.col));
        const Forest forest = fit_forest(x_train, p, y_train, fp);

        for (std::size_t r : predict_rows) {
          x_query.clear();
          for (std::size_t c = 0; c < matrix.cols; ++c)
            if (c != w.col) x_query.push_back(m.at(r, c));
          const double pred = predict_forest(forest, x_query);
          update_sum += std::abs(pred - m.at(r, w.col));
          ++update_count;
          m.at(r, w.col) = pred;
        }
      }
      if (chain == 0 && trace)
        trace->push_back(update_count == 0
                             ? 0.0
                             : update_sum / static_cast<double>(update_count));
    }
    for (std::size_t i = 0; i < m.cells.size(); ++i)
      chain_sum[i] += m.cells[i];
  }

  for (std::size_t i = 0; i < accum.cells.size(); ++i)
    if (accum.flags[i] == CellFlag::Missing)
      accum.cells[i] = chain_sum[i] / static_cast<double>(chains);
  return accum;
}

ImputationResult impute_mean(const TimeSeries& s) {
  return per_channel_impute(s, &fill_mean);
}
ImputationResult impute_locf(const TimeSeries& s) {
  return per_channel_impute(s, &fill_locf);
}
ImputationResult impute_linear(const TimeSeries& s) {
  return per_channel_impute(s, &fill_linear);
}

ImputationResult impute_knn(const TimeSeries& series,
                            const ImputationConfig& config) {
  SeriesMatrix m;
  const bool univariate = series.channels() == 1;
  if (univariate) {
    if (!config.t_period)
      throw MissingPeriod("knn on univariate input requires t_period");
    std::vector<double> values;
    std::vector<std::uint8_t> observed;
    extract_channel(series, 0, values, observed);
    ReshapeSpec spec{*config.t_period,
                     validate_period(series.length(), *config.t_period) ==
                             PeriodFit::Valid
                         ? PadPolicy::Strict
                         : PadPolicy::Pad};
    m = reshape_to_matrix(values, observed, spec);
  } else {
    if (config.t_period)
      throw DataError(
          "t_period is not applicable to multivariate input: the series is "
          "imputed on its epochs-by-channels grid without reshaping");
    m = grid_matrix(series);
  }

  const double global_mean = global_observed_mean(m);
  std::vector<double> col_mean(m.cols, global_mean);
  for (std::size_t c = 0; c < m.cols; ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t r = 0; r < m.rows; ++r)
      if (m.flag(r, c) == CellFlag::Observed) { sum += m.at(r, c); ++count; }
    if (count > 0) col_mean[c] = sum / static_cast<double>(count);
  }

  SeriesMatrix filled = m;
  struct Neighbor {
    double distance;
    std::size_t row;
  };
  std::vector<Neighbor> neighbors;
  for (std::size_t r = 0; r < m.rows; ++r) {
    bool has_hole = false;
    for (std::size_t c = 0; c < m.cols; ++c)
      if (m.flag(r, c) == CellFlag::Missing) has_hole = true;
    if (!has_hole) continue;

    neighbors.clear();
    for (std::size_t s = 0; s < m.rows; ++s) {
      if (s == r) continue;
      double sq = 0.0;
      std::size_t shared = 0;
      for (std::size_t c = 0; c < m.cols; ++c) {
        if (m.flag(r, c) == CellFlag::Observed &&
            m.flag(s, c) == CellFlag::Observed) {
          const double diff = m.at(r, c) - m.at(s, c);
          sq += diff * diff;
          ++shared;
        }
      }
      if (shared == 0) continue;  // no co-observed coordinates
      const double scaled =
          sq * static_cast<double>(m.cols) / static_cast<double>(shared);
      neighbors.push_back({std::sqrt(scaled), s});
    }
    std::sort(neighbors.begin(), neighbors.end(),
              [](const Neighbor& a, const Neighbor& b) {
                return a.distance < b.distance ||
                       (a.distance == b.distance && a.row < b.row);
              });
    const std::size_t k = std::min<std::size_t>(config.knn_k, neighbors.size());

    for (std::size_t c = 0; c < m.cols; ++c) {
      if (m.flag(r, c) != CellFlag::Missing) continue;
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t i = 0; i < k; ++i)
        if (m.flag(neighbors[i].row, c) == CellFlag::Observed) {
          sum += m.at(neighbors[i].row, c);
          ++count;
        }
      filled.at(r, c) =
          count > 0 ? sum / static_cast<double>(count) : col_mean[c];
    }
  }
  for (auto& f : filled.flags)
    if (f == CellFlag::Missing) f = CellFlag::Observed;

  TimeSeries out = complete_copy(series);
  if (univariate) {
    std::vector<double> values;
    std::vector<std::uint8_t> observed;
    reshape_to_series(filled, values, observed);
    for (std::size_t t = 0; t < series.length(); ++t) out.set(t, 0, values[t]);
  } else {
    for (std::size_t t = 0; t < series.length(); ++t)
      for (std::size_t c = 0; c < series.channels(); ++c)
        out.set(t, c, filled.at(t, c));
  }
  return {std::move(out), {}};
}

namespace {

ImputationResult impute_mice_rf(const TimeSeries& series,
                                const ImputationConfig& config) {
  std::vector<double> trace;
  if (series.channels() == 1) {
    if (!config.t_period)
      throw MissingPeriod("mice_rf on univariate input requires t_period");
    std::vector<double> values;
    std::vector<std::uint8_t> observed;
    extract_channel(series, 0, values, observed);
    ReshapeSpec spec{*config.t_period,
                     validate_period(series.length(), *config.t_period) ==
                             PeriodFit::Valid
                         ? PadPolicy::Strict
                         : PadPolicy::Pad};
    const SeriesMatrix folded = reshape_to_matrix(values, observed, spec);
    const SeriesMatrix imputed = mice_impute(folded, config, &trace);

    std::vector<double> out_values;
    std::vector<std::uint8_t> out_observed;
    reshape_to_series(imputed, out_values, out_observed);
    // Holes outside the tail row are now imputed. Holes in the excluded
    // padding row are resolved by linear interpolation on the flat series.
    const std::size_t t_i = series.length();
    const std::size_t cols = *config.t_period;
    const std::size_t tail_start =
        t_i % cols == 0 ? t_i : (t_i / cols) * cols;
    bool any_hole = false;
    for (std::size_t j = 0; j < out_observed.size(); ++j) {
      if (j < tail_start)
        out_observed[j] = 1;
      else if (!out_observed[j])
        any_hole = true;
    }
    if (any_hole) fill_linear(out_values, out_observed);

    TimeSeries out = complete_copy(series);
    for (std::size_t t = 0; t < series.length(); ++t)
      out.set(t, 0, out_values[t]);
    return {std::move(out), std::move(trace)};
  }

  if (config.t_period)
    throw DataError(
        "t_period is not applicable to multivariate input: the series is "
        "imputed on its epochs-by-channels grid without reshaping");
  const SeriesMatrix imputed = mice_impute(grid_matrix(series), config, &trace);
  TimeSeries out = complete_copy(series);
  for (std::size_t t = 0; t < series.length(); ++t)
    for (std::size_t c = 0; c < series.channels(); ++c)
      out.set(t, c, imputed.at(t, c));
  return {std::move(out), std::move(trace)};
}

}  // namespace

ImputationResult impute_series(const TimeSeries& series,
                               const ImputationConfig& config) {
  switch (config.method) {
    case ImputeMethod::MiceRf: return impute_mice_rf(series, config);
    case ImputeMethod::Mean: return impute_mean(series);
    case ImputeMethod::Locf: return impute_locf(series);
    case ImputeMethod::Linear: return impute_linear(series);
    case ImputeMethod::Knn: return impute_knn(series, config);
  }
  throw UsageError("unknown imputation method");
}

}  // namespace tsimp
