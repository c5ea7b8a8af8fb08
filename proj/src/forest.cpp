#include "tsimp/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tsimp {
namespace {

struct ValueTarget {
  double value;
  double target;
};

// Scratch-buffer split search over a row subset. Pairs are sorted by
// (value, target) so the scan order is canonical regardless of row order.
std::optional<SplitChoice> best_split_subset(
    std::span<const double> features, std::size_t p,
    std::span<const double> targets, std::span<const std::size_t> rows,
    std::span<const std::size_t> candidates, std::vector<ValueTarget>& scratch) {
  const std::size_t m = rows.size();
  if (m < 2 || candidates.empty()) return std::nullopt;

  std::optional<SplitChoice> best;
  for (std::size_t f : candidates) {
    scratch.clear();
    for (std::size_t r : rows)
      scratch.push_back({features[r * p + f], targets[r]});
    std::sort(scratch.begin(), scratch.end(),
              [](const ValueTarget& a, const ValueTarget& b) {
                return a.value < b.value ||
                       (a.value == b.value && a.target < b.target);
              });

    double total_sum = 0.0, total_sq = 0.0;
    for (const auto& vt : scratch) {
      total_sum += vt.target;
      total_sq += vt.target * vt.target;
    }
    const double sse_total = total_sq - total_sum * total_sum / double(m);

    double left_sum = 0.0, left_sq = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      left_sum += scratch[i].target;
      left_sq += scratch[i].target * scratch[i].target;
      if (scratch[i].value == scratch[i + 1].value) continue;
      const double nl = double(i + 1);
      const double nr = double(m - i - 1);
      const double right_sum = total_sum - left_sum;
      const double right_sq = total_sq - left_sq;
      const double sse_l = left_sq - left_sum * left_sum / nl;
      const double sse_r = right_sq - right_sum * right_sum / nr;
      const double reduction = (sse_total - sse_l - sse_r) / double(m);
      // Reductions within 1e-9 relative are treated as tied, so the lowest
      // feature index and smallest threshold win regardless of summation
      // round-off.
      if (reduction > 0.0 &&
          (!best ||
           reduction > best->variance_reduction * (1.0 + 1e-9))) {
        best = SplitChoice{f, (scratch[i].value + scratch[i + 1].value) / 2.0,
                           reduction};
      }
    }
  }
  return best;
}

class TreeBuilder {
 public:
  TreeBuilder(std::span<const double> features, std::size_t p,
              std::span<const double> targets, const ForestParams& params,
              Rng& rng)
      : features_(features), p_(p), targets_(targets), params_(params),
        rng_(rng) {
    all_features_.resize(p);
    std::iota(all_features_.begin(), all_features_.end(), std::size_t{0});
    n_candidates_ = static_cast<std::size_t>(
        std::ceil(params.max_features * static_cast<double>(p)));
    n_candidates_ = std::clamp<std::size_t>(n_candidates_, 1, p);
  }

  Tree build(std::vector<std::size_t>& rows) {
    Tree tree;
    scratch_.reserve(rows.size());
    partition_buf_.reserve(rows.size());
    grow(tree, rows, 0, rows.size(), 0);
    return tree;
  }

 private:
  int leaf(Tree& tree, std::span<const std::size_t> rows) {
    double sum = 0.0;
    for (std::size_t r : rows) sum += targets_[r];
    TreeNode node;
    node.value = sum / static_cast<double>(rows.size());
    tree.nodes.push_back(node);
    return static_cast<int>(tree.nodes.size() - 1);
  }

  std::span<const std::size_t> pick_candidates() {
    if (n_candidates_ == p_) return all_features_;
    for (std::size_t i = 0; i < n_candidates_; ++i) {
      const std::size_t j = i + rng_.next_below(p_ - i);
      std::swap(all_features_[i], all_features_[j]);
    }
    std::sort(all_features_.begin(), all_features_.begin() + n_candidates_);
    return {all_features_.data(), n_candidates_};
  }

  int grow(Tree& tree, std::vector<std::size_t>& rows, std::size_t begin,
           std::size_t end, int depth) {
    const std::span<const std::size_t> node_rows{rows.data() + begin,
                                                 end - begin};
    const std::size_t m = node_rows.size();

    bool stop = m < static_cast<std::size_t>(params_.min_samples_split);
    if (params_.max_depth && depth >= *params_.max_depth) stop = true;
    if (!stop) {
      const double first = targets_[node_rows[0]];
      stop = std::all_of(node_rows.begin(), node_rows.end(),
                         [&](std::size_t r) { return targets_[r] == first; });
    }
    if (stop) return leaf(tree, node_rows);

    const auto split = best_split_subset(features_, p_, targets_, node_rows,
                                         pick_candidates(), scratch_);
    if (!split) return leaf(tree, node_rows);

    // Stable partition: left gets x[f] < threshold, order preserved.
    partition_buf_.clear();
    std::size_t mid = begin;
    for (std::size_t i = begin; i < end; ++i) {
      if (features_[rows[i] * p_ + split->feature] < split->threshold)
        rows[mid++] = rows[i];
      else
        partition_buf_.push_back(rows[i]);
    }
    std::copy(partition_buf_.begin(), partition_buf_.end(),
              rows.begin() + mid);

    const std::size_t n_left = mid - begin;
    const std::size_t n_right = end - mid;
    if (n_left < static_cast<std::size_t>(params_.min_samples_leaf) ||
        n_right < static_cast<std::size_t>(params_.min_samples_leaf))
      return leaf(tree, node_rows);

    TreeNode node;
    node.feature = static_cast<int>(split->feature);
    node.threshold = split->threshold;
    tree.nodes.push_back(node);
    const int self = static_cast<int>(tree.nodes.size() - 1);
    const int left = grow(tree, rows, begin, mid, depth + 1);
    const int right = grow(tree, rows, mid, end, depth + 1);
    tree.nodes[self].left = left;
    tree.nodes[self].right = right;
    return self;
  }

  std::span<const double> features_;
  std::size_t p_;
  std::span<const double> targets_;
  const ForestParams& params_;
  Rng& rng_;
  std::vector<std::size_t> all_features_;
  std::size_t n_candidates_;
  std::vector<ValueTarget> scratch_;
  std::vector<std::size_t> partition_buf_;
};

}  // namespace

std::optional<SplitChoice> best_split(
    std::span<const double> features, std::size_t n_features,
    std::span<const double> targets,
    std::span<const std::size_t> candidate_features) {
  std::vector<std::size_t> rows(targets.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::vector<std::size_t> candidates(candidate_features.begin(),
                                      candidate_features.end());
  std::sort(candidates.begin(), candidates.end());
  std::vector<ValueTarget> scratch;
  return best_split_subset(features, n_features, targets, rows, candidates,
                           scratch);
}

Tree fit_tree(std::span<const double> features, std::size_t n_features,
              std::span<const double> targets, const ForestParams& params,
              Rng& rng) {
  if (targets.empty()) throw EmptyTrainingSet("fit_tree: no training rows");
  std::vector<std::size_t> rows(targets.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  TreeBuilder builder(features, n_features, targets, params, rng);
  return builder.build(rows);
}

double predict_tree(const Tree& tree, std::span<const double> x,
                    std::size_t n_features) {
  if (x.size() != n_features)
    throw DimensionMismatch("predict_tree: expected " +
                            std::to_string(n_features) + " features, got " +
                            std::to_string(x.size()));
  const TreeNode* node = &tree.nodes[0];
  while (!node->is_leaf()) {
    node = x[static_cast<std::size_t>(node->feature)] < node->threshold
               ? &tree.nodes[static_cast<std::size_t>(node->left)]
               : &tree.nodes[static_cast<std::size_t>(node->right)];
  }
  return node->value;
}

Forest fit_forest(std::span<const double> features, std::size_t n_features,
                  std::span<const double> targets, const ForestParams& params) {
  const std::size_t m = targets.size();
  if (m == 0) throw EmptyTrainingSet("fit_forest: no training rows");

  Forest forest;
  forest.params = params;
  forest.n_features = n_features;
  forest.target_min = *std::min_element(targets.begin(), targets.end());
  forest.target_max = *std::max_element(targets.begin(), targets.end());
  forest.trees.reserve(static_cast<std::size_t>(params.n_trees));

  std::vector<double> sample_features;
  std::vector<double> sample_targets;
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(t)));
    if (params.bootstrap) {
      sample_features.clear();
      sample_targets.clear();
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t r = rng.next_below(m);
        sample_features.insert(sample_features.end(),
                               features.begin() + r * n_features,
                               features.begin() + (r + 1) * n_features);
        sample_targets.push_back(targets[r]);
      }
      TreeBuilder builder(sample_features, n_features, sample_targets, params,
                          rng);
      std::vector<std::size_t> rows(m);
      std::iota(rows.begin(), rows.end(), std::size_t{0});
      forest.trees.push_back(builder.build(rows));
    } else {
      TreeBuilder builder(features, n_features, targets, params, rng);
      std::vector<std::size_t> rows(m);
      std::iota(rows.begin(), rows.end(), std::size_t{0});
      forest.trees.push_back(builder.build(rows));
    }
  }
  return forest;
}

double predict_forest(const Forest& forest, std::span<const double> x) {
  double sum = 0.0;
  for (const Tree& tree : forest.trees)
    sum += predict_tree(tree, x, forest.n_features);
  return sum / static_cast<double>(forest.trees.size());
}

}  // namespace tsimp
