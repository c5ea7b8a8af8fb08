#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tsimp/error.hpp"
#include "tsimp/series.hpp"

namespace tsimp {

struct MetricBundle {
  std::optional<double> mae;   // imputation evaluations only
  double f1 = 0.0;
  double auc = 0.0;
  double mcc = 0.0;
};

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

enum class F1Averaging { BinaryPositive, Macro };

/// Mean absolute error over the artificially masked slots only.
double mae(const TimeSeries& ground_truth, const TimeSeries& imputed,
           std::span<const std::size_t> sim_mask);

ConfusionCounts confusion_counts(std::span<const int> y_true,
                                 std::span<const int> y_pred,
                                 int positive_class);

double f1(std::span<const int> y_true, std::span<const int> y_pred,
          F1Averaging averaging);

/// Tie-adjusted Mann-Whitney rank statistic; both classes must be present.
double roc_auc(std::span<const int> y_true, std::span<const double> scores);

/// Macro mean of one-vs-rest AUCs; scores[i] holds one score per class.
double roc_auc_macro(std::span<const int> y_true,
                     const std::vector<std::vector<double>>& class_scores);

/// Binary MCC, or the Gorodkin generalization when more than two classes
/// appear. Zero denominator yields 0.
double mcc(std::span<const int> y_true, std::span<const int> y_pred);

}  // namespace tsimp
