#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tsimp/error.hpp"
#include "tsimp/rng.hpp"

namespace tsimp {

struct ForestParams {
  int n_trees = 100;
  std::optional<int> max_depth;   // nullopt = unlimited
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  double max_features = 1.0;      // fraction of features tried per split
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

/// Flat arena node. feature < 0 marks a leaf; value then holds the mean of
/// the training targets that reached it.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;    // nodes[0] is the root
};

struct Forest {
  std::vector<Tree> trees;
  ForestParams params;
  std::size_t n_features = 0;
  double target_min = 0.0;
  double target_max = 0.0;
};

struct SplitChoice {
  std::size_t feature = 0;
  double threshold = 0.0;
  double variance_reduction = 0.0;
};

/// Best variance-reduction split over the candidate features. Thresholds are
/// midpoints between consecutive distinct sorted feature values; ties break
/// toward the lowest feature index, then the smallest threshold. Empty
/// result means no split reduces variance.
std::optional<SplitChoice> best_split(
    std::span<const double> features, std::size_t n_features,
    std::span<const double> targets,
    std::span<const std::size_t> candidate_features);

/// Greedy CART regression tree. Rows with x[feature] < threshold route left;
/// equality routes right.
Tree fit_tree(std::span<const double> features, std::size_t n_features,
              std::span<const double> targets, const ForestParams& params,
              Rng& rng);

double predict_tree(const Tree& tree, std::span<const double> x,
                    std::size_t n_features);

/// Bagged ensemble; tree t trains on a bootstrap resample drawn from a
/// stream seeded by (params.seed, t), so the fit is schedule-independent.
Forest fit_forest(std::span<const double> features, std::size_t n_features,
                  std::span<const double> targets, const ForestParams& params);

double predict_forest(const Forest& forest, std::span<const double> x);

}  // namespace tsimp
