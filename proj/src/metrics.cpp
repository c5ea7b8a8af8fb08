#include "tsimp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace tsimp {

double mae(const TimeSeries& ground_truth, const TimeSeries& imputed,
           std::span<const std::size_t> sim_mask) {
  if (ground_truth.length() != imputed.length() ||
      ground_truth.channels() != imputed.channels())
    throw ShapeMismatch("mae: series shapes differ");
  if (sim_mask.empty()) throw EmptyMask("mae: empty mask");
  double sum = 0.0;
  for (std::size_t slot : sim_mask)
    sum += std::abs(imputed.value_at_slot(slot) -
                    ground_truth.value_at_slot(slot));
  return sum / static_cast<double>(sim_mask.size());
}

ConfusionCounts confusion_counts(std::span<const int> y_true,
                                 std::span<const int> y_pred,
                                 int positive_class) {
  if (y_true.size() != y_pred.size() || y_true.empty())
    throw LengthMismatch("confusion_counts: label sequences differ or empty");
  ConfusionCounts c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool t = y_true[i] == positive_class;
    const bool p = y_pred[i] == positive_class;
    if (t && p) ++c.tp;
    else if (!t && p) ++c.fp;
    else if (t && !p) ++c.fn;
    else ++c.tn;
  }
  return c;
}

namespace {

double f1_from_counts(const ConfusionCounts& c) {
  const double denom = static_cast<double>(2 * c.tp + c.fp + c.fn);
  return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / denom;
}

std::vector<int> distinct_classes(std::span<const int> a,
                                  std::span<const int> b) {
  std::set<int> s(a.begin(), a.end());
  s.insert(b.begin(), b.end());
  return {s.begin(), s.end()};
}

}  // namespace

double f1(std::span<const int> y_true, std::span<const int> y_pred,
          F1Averaging averaging) {
  if (y_true.size() != y_pred.size() || y_true.empty())
    throw LengthMismatch("f1: label sequences differ or empty");
  if (averaging == F1Averaging::BinaryPositive)
    return f1_from_counts(confusion_counts(y_true, y_pred, 1));
  const auto classes = distinct_classes(y_true, y_pred);
  double sum = 0.0;
  for (int cls : classes)
    sum += f1_from_counts(confusion_counts(y_true, y_pred, cls));
  return sum / static_cast<double>(classes.size());
}

double roc_auc(std::span<const int> y_true, std::span<const double> scores) {
  if (y_true.size() != scores.size() || y_true.empty())
    throw LengthMismatch("roc_auc: sizes differ or empty");
  std::size_t n_pos = 0;
  for (int y : y_true)
    if (y == 1) ++n_pos;
  const std::size_t n_neg = y_true.size() - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw SingleClass("roc_auc: both classes must be present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  // Average ranks over tied scores, then the Mann-Whitney statistic.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) +
                             static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (y_true[order[k]] == 1) rank_sum_pos += avg_rank;
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

double roc_auc_macro(std::span<const int> y_true,
                     const std::vector<std::vector<double>>& class_scores) {
  if (class_scores.empty())
    throw LengthMismatch("roc_auc_macro: no class scores");
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t cls = 0; cls < class_scores.size(); ++cls) {
    std::vector<int> ovr(y_true.size());
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      ovr[i] = y_true[i] == static_cast<int>(cls) ? 1 : 0;
      (ovr[i] ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) continue;
    sum += roc_auc(ovr, class_scores[cls]);
    ++used;
  }
  if (used == 0) throw SingleClass("roc_auc_macro: single class");
  return sum / static_cast<double>(used);
}

double mcc(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty())
    throw LengthMismatch("mcc: label sequences differ or empty");
  const auto classes = distinct_classes(y_true, y_pred);

  if (classes.size() <= 2) {
    const auto c = confusion_counts(y_true, y_pred, 1);
    const double tp = double(c.tp), fp = double(c.fp), fn = double(c.fn),
                 tn = double(c.tn);
    const double denom =
        (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    if (denom == 0.0) return 0.0;
    return (tp * tn - fp * fn) / std::sqrt(denom);
  }

  // Gorodkin generalization from the full confusion matrix.
  std::map<int, std::size_t> index;
  for (std::size_t k = 0; k < classes.size(); ++k) index[classes[k]] = k;
  const std::size_t k = classes.size();
  std::vector<double> conf(k * k, 0.0);
  for (std::size_t i = 0; i < y_true.size(); ++i)
    conf[index[y_true[i]] * k + index[y_pred[i]]] += 1.0;

  const double s = static_cast<double>(y_true.size());
  double correct = 0.0;
  std::vector<double> truth_count(k, 0.0), pred_count(k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    correct += conf[a * k + a];
    for (std::size_t b = 0; b < k; ++b) {
      truth_count[a] += conf[a * k + b];
      pred_count[b] += conf[a * k + b];
    }
  }
  double dot = 0.0, t_sq = 0.0, p_sq = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    dot += truth_count[a] * pred_count[a];
    t_sq += truth_count[a] * truth_count[a];
    p_sq += pred_count[a] * pred_count[a];
  }
  const double denom = std::sqrt(s * s - p_sq) * std::sqrt(s * s - t_sq);
  if (denom == 0.0) return 0.0;
  return (correct * s - dot) / denom;
}

}  // namespace tsimp
