#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsimp/metrics.hpp"
#include "tsimp/series.hpp"

namespace tsimp {

enum class ClassifierKind { LogReg, AdaBoost, Knn };

ClassifierKind parse_classifier(const std::string& name);
std::string classifier_name(ClassifierKind kind);

struct FeatureVector {
  std::vector<double> values;
  std::string series_id;
  int label = 0;
};

/// Per channel: mean, population std, fraction of exactly-zero epochs.
FeatureVector extract_features(const TimeSeries& series);

/// Per-feature standardization statistics, always computed from training
/// data only.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // std, or 1 where std is 0

  static Standardizer fit(const std::vector<FeatureVector>& train);
  std::vector<double> apply(const std::vector<double>& x) const;
};

struct LogRegParams {
  double l2 = 1.0;
  int max_steps = 1000;
  double tol = 1e-6;
};

struct AdaBoostParams {
  int rounds = 50;
  double learning_rate = 1.0;
};

class LogRegModel {
 public:
  static LogRegModel fit(const std::vector<FeatureVector>& train,
                         const LogRegParams& params = {});
  /// P(label = 1).
  double predict_proba(const std::vector<double>& x) const;
  int predict(const std::vector<double>& x) const;

  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }

 private:
  Standardizer standardizer_;
  std::vector<double> weights_;
  double bias_ = 0.0;
};

class AdaBoostModel {
 public:
  static AdaBoostModel fit(const std::vector<FeatureVector>& train,
                           const AdaBoostParams& params = {});
  double predict_proba(const std::vector<double>& x) const;
  int predict(const std::vector<double>& x) const;

  std::size_t rounds_used() const { return stumps_.size(); }

 private:
  struct Stump {
    std::size_t feature = 0;
    double threshold = 0.0;
    int below_label = 1;  // +1 / -1 margin sign for x[f] < threshold
    double alpha = 0.0;
  };
  Standardizer standardizer_;
  std::vector<Stump> stumps_;
  int tie_label_ = 0;  // majority training class, used at zero margin
};

struct KnnPrediction {
  int label = 0;
  std::vector<double> score_per_class;  // vote fractions, indexed by class id
};

class KnnModel {
 public:
  static KnnModel fit(const std::vector<FeatureVector>& train,
                      std::size_t k = 5);
  KnnPrediction classify(const std::vector<double>& x) const;

  int n_classes() const { return n_classes_; }

 private:
  Standardizer standardizer_;
  std::vector<std::vector<double>> points_;
  std::vector<int> labels_;
  std::size_t k_ = 5;
  int n_classes_ = 0;
};

struct CrossValidateOptions {
  int folds = 5;
  std::uint64_t seed = 0;
  LogRegParams logreg;
  AdaBoostParams adaboost;
  std::size_t knn_k = 5;
};

/// Stratified k-fold with a seeded shuffle; returns fold-mean F1/AUC/MCC.
MetricBundle cross_validate(const std::vector<FeatureVector>& samples,
                            ClassifierKind kind,
                            const CrossValidateOptions& options);

}  // namespace tsimp
