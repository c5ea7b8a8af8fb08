#include "tsimp/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "tsimp/rng.hpp"

namespace tsimp {

ClassifierKind parse_classifier(const std::string& name) {
  if (name == "logreg") return ClassifierKind::LogReg;
  if (name == "adaboost") return ClassifierKind::AdaBoost;
  if (name == "knn") return ClassifierKind::Knn;
  throw UsageError("unknown classifier '" + name +
                   "'; valid classifiers: logreg, adaboost, knn");
}

std::string classifier_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::LogReg: return "logreg";
    case ClassifierKind::AdaBoost: return "adaboost";
    case ClassifierKind::Knn: return "knn";
  }
  return "?";
}

FeatureVector extract_features(const TimeSeries& series) {
  FeatureVector fv;
  fv.series_id = series.id();
  fv.label = series.label();
  const std::size_t t = series.length();
  for (std::size_t c = 0; c < series.channels(); ++c) {
    double sum = 0.0;
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < t; ++i) {
      sum += series.value(i, c);
      if (series.value(i, c) == 0.0) ++zeros;
    }
    const double mean = sum / static_cast<double>(t);
    double sq = 0.0;
    for (std::size_t i = 0; i < t; ++i) {
      const double d = series.value(i, c) - mean;
      sq += d * d;
    }
    fv.values.push_back(mean);
    fv.values.push_back(std::sqrt(sq / static_cast<double>(t)));
    fv.values.push_back(static_cast<double>(zeros) / static_cast<double>(t));
  }
  return fv;
}

Standardizer Standardizer::fit(const std::vector<FeatureVector>& train) {
  if (train.empty()) throw EmptyTrainingSet("standardizer: no training data");
  const std::size_t p = train[0].values.size();
  Standardizer s;
  s.mean.assign(p, 0.0);
  s.scale.assign(p, 1.0);
  for (const auto& fv : train)
    for (std::size_t j = 0; j < p; ++j) s.mean[j] += fv.values[j];
  for (double& m : s.mean) m /= static_cast<double>(train.size());
  for (std::size_t j = 0; j < p; ++j) {
    double sq = 0.0;
    for (const auto& fv : train) {
      const double d = fv.values[j] - s.mean[j];
      sq += d * d;
    }
    const double sd = std::sqrt(sq / static_cast<double>(train.size()));
    s.scale[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

std::vector<double> Standardizer::apply(const std::vector<double>& x) const {
  if (x.size() != mean.size())
    throw DimensionMismatch("standardizer: feature count mismatch");
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j)
    out[j] = (x[j] - mean[j]) / scale[j];
  return out;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void require_binary(const std::vector<FeatureVector>& train,
                    const char* what) {
  bool has0 = false, has1 = false;
  for (const auto& fv : train) {
    if (fv.label == 0) has0 = true;
    else if (fv.label == 1) has1 = true;
    else
      throw MulticlassUnsupported(std::string(what) +
                                  ": labels must be in {0, 1}");
  }
  if (!has0 || !has1)
    throw SingleClass(std::string(what) + ": both classes must be present");
}

}  // namespace

LogRegModel LogRegModel::fit(const std::vector<FeatureVector>& train,
                             const LogRegParams& params) {
  require_binary(train, "logreg");
  LogRegModel model;
  model.standardizer_ = Standardizer::fit(train);
  const std::size_t m = train.size();
  const std::size_t p = train[0].values.size();

  std::vector<std::vector<double>> x(m);
  std::vector<double> sign(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = model.standardizer_.apply(train[i].values);
    sign[i] = train[i].label == 1 ? 1.0 : -1.0;
  }

  std::vector<double> w(p, 0.0);
  double b = 0.0;

  auto objective = [&](const std::vector<double>& wv, double bv) {
    double loss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double z = bv;
      for (std::size_t j = 0; j < p; ++j) z += wv[j] * x[i][j];
      const double t = -sign[i] * z;
      // log(1 + e^t) computed stably
      loss += t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    }
    double reg = 0.0;
    for (double v : wv) reg += v * v;
    return loss / double(m) + params.l2 * reg / (2.0 * double(m));
  };

  std::vector<double> grad_w(p);
  std::vector<double> trial_w(p);
  for (int step = 0; step < params.max_steps; ++step) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double z = b;
      for (std::size_t j = 0; j < p; ++j) z += w[j] * x[i][j];
      const double g = -sign[i] * sigmoid(-sign[i] * z);
      for (std::size_t j = 0; j < p; ++j) grad_w[j] += g * x[i][j];
      grad_b += g;
    }
    double grad_sq = 0.0, grad_inf = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      grad_w[j] = grad_w[j] / double(m) + params.l2 * w[j] / double(m);
      grad_sq += grad_w[j] * grad_w[j];
      grad_inf = std::max(grad_inf, std::abs(grad_w[j]));
    }
    grad_b /= double(m);
    grad_sq += grad_b * grad_b;
    grad_inf = std::max(grad_inf, std::abs(grad_b));
    if (grad_inf < params.tol) break;

    // Backtracking line search (Armijo).
    const double current = objective(w, b);
    double step_size = 1.0;
    while (step_size > 1e-12) {
      for (std::size_t j = 0; j < p; ++j)
        trial_w[j] = w[j] - step_size * grad_w[j];
      const double trial_b = b - step_size * grad_b;
      if (objective(trial_w, trial_b) <= current - 1e-4 * step_size * grad_sq)
        break;
      step_size *= 0.5;
    }
    for (std::size_t j = 0; j < p; ++j) w[j] -= step_size * grad_w[j];
    b -= step_size * grad_b;
  }

  model.weights_ = std::move(w);
  model.bias_ = b;
  return model;
}

double LogRegModel::predict_proba(const std::vector<double>& x) const {
  const auto xs = standardizer_.apply(x);
  double z = bias_;
  for (std::size_t j = 0; j < xs.size(); ++j) z += weights_[j] * xs[j];
  return sigmoid(z);
}

int LogRegModel::predict(const std::vector<double>& x) const {
  return predict_proba(x) > 0.5 ? 1 : 0;
}

AdaBoostModel AdaBoostModel::fit(const std::vector<FeatureVector>& train,
                                 const AdaBoostParams& params) {
  require_binary(train, "adaboost");
  AdaBoostModel model;
  model.standardizer_ = Standardizer::fit(train);
  const std::size_t m = train.size();
  const std::size_t p = train[0].values.size();

  std::vector<std::vector<double>> x(m);
  std::vector<double> sign(m);
  std::size_t positives = 0;
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = model.standardizer_.apply(train[i].values);
    sign[i] = train[i].label == 1 ? 1.0 : -1.0;
    if (train[i].label == 1) ++positives;
  }
  model.tie_label_ = positives > m - positives ? 1 : 0;

  std::vector<double> weight(m, 1.0 / double(m));

  struct Indexed {
    double value;
    std::size_t row;
  };
  std::vector<Indexed> sorted(m);

  for (int round = 0; round < params.rounds; ++round) {
    // Weighted-error-minimizing stump; ties break toward the lowest
    // feature, smallest threshold, below_label = +1 first.
    double best_err = std::numeric_limits<double>::infinity();
    Stump best;
    for (std::size_t f = 0; f < p; ++f) {
      for (std::size_t i = 0; i < m; ++i) sorted[i] = {x[i][f], i};
      std::sort(sorted.begin(), sorted.end(),
                [](const Indexed& a, const Indexed& b) {
                  return a.value < b.value;
                });
      // err(below=+1, thr) = w(neg below) + w(pos above)
      double pos_total = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        if (sign[i] > 0) pos_total += weight[i];
      double neg_below = 0.0, pos_below = 0.0;
      for (std::size_t i = 0; i + 1 < m; ++i) {
        const std::size_t r = sorted[i].row;
        if (sign[r] > 0) pos_below += weight[r];
        else neg_below += weight[r];
        if (sorted[i].value == sorted[i + 1].value) continue;
        const double thr = (sorted[i].value + sorted[i + 1].value) / 2.0;
        const double err_below_pos = neg_below + (pos_total - pos_below);
        const double err_below_neg = 1.0 - err_below_pos;
        // Errors within 1e-9 relative count as tied, so the first candidate
        // in enumeration order wins regardless of summation round-off.
        if (err_below_pos < best_err * (1.0 - 1e-9)) {
          best_err = err_below_pos;
          best = {f, thr, +1, 0.0};
        }
        if (err_below_neg < best_err * (1.0 - 1e-9)) {
          best_err = err_below_neg;
          best = {f, thr, -1, 0.0};
        }
      }
    }

    if (!std::isfinite(best_err) || best_err >= 0.5) break;

    const double eps = std::max(best_err, 1e-10);
    best.alpha = params.learning_rate * 0.5 * std::log((1.0 - eps) / eps);
    model.stumps_.push_back(best);
    if (best_err == 0.0) break;  // perfect stump, coefficient capped above

    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double h =
          (x[i][best.feature] < best.threshold ? 1.0 : -1.0) * best.below_label;
      weight[i] *= std::exp(-best.alpha * sign[i] * h);
      total += weight[i];
    }
    for (double& wi : weight) wi /= total;
  }
  return model;
}

double AdaBoostModel::predict_proba(const std::vector<double>& x) const {
  const auto xs = standardizer_.apply(x);
  double margin = 0.0;
  for (const Stump& s : stumps_) {
    const double h =
        (xs[s.feature] < s.threshold ? 1.0 : -1.0) * s.below_label;
    margin += s.alpha * h;
  }
  return sigmoid(margin);
}

int AdaBoostModel::predict(const std::vector<double>& x) const {
  const double proba = predict_proba(x);
  if (proba == 0.5) return tie_label_;
  return proba > 0.5 ? 1 : 0;
}

KnnModel KnnModel::fit(const std::vector<FeatureVector>& train,
                       std::size_t k) {
  if (train.empty()) throw EmptyTrainingSet("knn: no training data");
  if (k == 0 || k > train.size())
    throw KTooLarge("knn: k must satisfy 1 <= k <= training size");
  KnnModel model;
  model.standardizer_ = Standardizer::fit(train);
  model.k_ = k;
  for (const auto& fv : train) {
    if (fv.label < 0) throw DataError("knn: class ids must be >= 0");
    model.points_.push_back(model.standardizer_.apply(fv.values));
    model.labels_.push_back(fv.label);
    model.n_classes_ = std::max(model.n_classes_, fv.label + 1);
  }
  return model;
}

KnnPrediction KnnModel::classify(const std::vector<double>& x) const {
  const auto xs = standardizer_.apply(x);
  struct Neighbor {
    double dist_sq;
    std::size_t index;
  };
  std::vector<Neighbor> neighbors(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const double d = xs[j] - points_[i][j];
      sq += d * d;
    }
    neighbors[i] = {sq, i};
  }
  std::sort(neighbors.begin(), neighbors.end(),
            [](const Neighbor& a, const Neighbor& b) {
              return a.dist_sq < b.dist_sq ||
                     (a.dist_sq == b.dist_sq && a.index < b.index);
            });

  KnnPrediction out;
  out.score_per_class.assign(static_cast<std::size_t>(n_classes_), 0.0);
  for (std::size_t i = 0; i < k_; ++i)
    out.score_per_class[static_cast<std::size_t>(
        labels_[neighbors[i].index])] += 1.0;
  for (double& s : out.score_per_class) s /= static_cast<double>(k_);

  out.label = 0;
  for (int c = 1; c < n_classes_; ++c)
    if (out.score_per_class[static_cast<std::size_t>(c)] >
        out.score_per_class[static_cast<std::size_t>(out.label)])
      out.label = c;  // ties keep the smallest class id
  return out;
}

MetricBundle cross_validate(const std::vector<FeatureVector>& samples,
                            ClassifierKind kind,
                            const CrossValidateOptions& options) {
  const std::size_t n = samples.size();
  const std::size_t folds = static_cast<std::size_t>(options.folds);

  std::set<int> class_set;
  for (const auto& fv : samples) class_set.insert(fv.label);
  for (int cls : class_set) {
    std::size_t count = 0;
    for (const auto& fv : samples)
      if (fv.label == cls) ++count;
    if (count < folds)
      throw ClassTooSmall("cross_validate: class " + std::to_string(cls) +
                          " has " + std::to_string(count) +
                          " members, fewer than " + std::to_string(folds) +
                          " folds");
  }
  const bool binary = class_set.size() <= 2;
  const int n_classes = class_set.empty() ? 0 : *class_set.rbegin() + 1;

  // Stratified assignment: shuffle each class's members, deal round-robin.
  std::vector<std::size_t> fold_of(n, 0);
  for (int cls : class_set) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i)
      if (samples[i].label == cls) members.push_back(i);
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(cls)));
    for (std::size_t i = 0; i + 1 < members.size(); ++i) {
      const std::size_t j = i + rng.next_below(members.size() - i);
      std::swap(members[i], members[j]);
    }
    for (std::size_t i = 0; i < members.size(); ++i)
      fold_of[members[i]] = i % folds;
  }

  double f1_sum = 0.0, auc_sum = 0.0, mcc_sum = 0.0;
  for (std::size_t fold = 0; fold < folds; ++fold) {
    std::vector<FeatureVector> train;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < n; ++i) {
      if (fold_of[i] == fold) test.push_back(i);
      else train.push_back(samples[i]);
    }

    std::vector<int> y_true, y_pred;
    std::vector<double> scores;  // positive-class score (binary)
    std::vector<std::vector<double>> class_scores(
        static_cast<std::size_t>(n_classes));

    auto record = [&](std::size_t i, int pred, double pos_score,
                      const std::vector<double>* per_class) {
      y_true.push_back(samples[i].label);
      y_pred.push_back(pred);
      scores.push_back(pos_score);
      if (per_class)
        for (std::size_t c = 0; c < per_class->size(); ++c)
          class_scores[c].push_back((*per_class)[c]);
    };

    switch (kind) {
      case ClassifierKind::LogReg: {
        const auto model = LogRegModel::fit(train, options.logreg);
        for (std::size_t i : test)
          record(i, model.predict(samples[i].values),
                 model.predict_proba(samples[i].values), nullptr);
        break;
      }
      case ClassifierKind::AdaBoost: {
        const auto model = AdaBoostModel::fit(train, options.adaboost);
        for (std::size_t i : test)
          record(i, model.predict(samples[i].values),
                 model.predict_proba(samples[i].values), nullptr);
        break;
      }
      case ClassifierKind::Knn: {
        const std::size_t k = std::min(options.knn_k, train.size());
        const auto model = KnnModel::fit(train, k);
        for (std::size_t i : test) {
          const auto pred = model.classify(samples[i].values);
          std::vector<double> per_class = pred.score_per_class;
          per_class.resize(static_cast<std::size_t>(n_classes), 0.0);
          const double pos =
              n_classes >= 2 ? per_class[1] : 0.0;
          record(i, pred.label, pos, &per_class);
        }
        break;
      }
    }

    f1_sum += f1(y_true, y_pred,
                 binary ? F1Averaging::BinaryPositive : F1Averaging::Macro);
    mcc_sum += mcc(y_true, y_pred);
    if (binary)
      auc_sum += roc_auc(y_true, scores);
    else
      auc_sum += roc_auc_macro(y_true, class_scores);
  }

  MetricBundle out;
  out.f1 = f1_sum / static_cast<double>(folds);
  out.auc = auc_sum / static_cast<double>(folds);
  out.mcc = mcc_sum / static_cast<double>(folds);
  return out;
}

}  // namespace tsimp
