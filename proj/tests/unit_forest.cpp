#include "doctest.h"

#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "tsimp/forest.hpp"
#include "tsimp/rng.hpp"

using namespace tsimp;

namespace {

std::vector<double> flatten(const std::vector<std::vector<double>>& rows) {
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return flat;
}

bool trees_match(const Tree& tree, int node, const oracle::Node& ref) {
  const TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
  if (ref.leaf) {
    return n.is_leaf() && n.value == ref.value;
  }
  if (n.is_leaf()) return false;
  if (static_cast<std::size_t>(n.feature) != ref.feature) return false;
  if (n.threshold != ref.threshold) return false;
  return trees_match(tree, n.left, ref.children[0]) &&
         trees_match(tree, n.right, ref.children[1]);
}

}  // namespace

TEST_CASE("best_split: step data splits at the midpoint with reduction 25") {
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{0, 0, 10, 10};
  const std::vector<std::size_t> candidates{0};
  const auto split = best_split(x, 1, y, candidates);
  REQUIRE(split.has_value());
  CHECK(split->feature == 0);
  CHECK(split->threshold == doctest::Approx(1.5));
  CHECK(split->variance_reduction == doctest::Approx(25.0));
}

TEST_CASE("best_split: no split for constant targets or constant features") {
  const std::vector<std::size_t> candidates{0};
  CHECK_FALSE(best_split(std::vector<double>{0, 1, 2, 3}, 1,
                         std::vector<double>{5, 5, 5, 5}, candidates));
  CHECK_FALSE(best_split(std::vector<double>{2, 2, 2, 2}, 1,
                         std::vector<double>{0, 1, 2, 3}, candidates));
}

TEST_CASE("fit_tree: constant targets collapse to one leaf") {
  Rng rng(0);
  const std::vector<double> x{0, 1, 2};
  const std::vector<double> y{7, 7, 7};
  const auto tree = fit_tree(x, 1, y, {}, rng);
  REQUIRE(tree.nodes.size() == 1);
  CHECK(tree.nodes[0].is_leaf());
  CHECK(tree.nodes[0].value == 7.0);
}

TEST_CASE("fit_tree: depth-1 stump on step data") {
  Rng rng(0);
  ForestParams params;
  params.max_depth = 1;
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{0, 0, 10, 10};
  const auto tree = fit_tree(x, 1, y, params, rng);
  CHECK(predict_tree(tree, std::vector<double>{1.4}, 1) == 0.0);
  CHECK(predict_tree(tree, std::vector<double>{1.5}, 1) == 10.0);  // >= right
  CHECK(predict_tree(tree, std::vector<double>{1.6}, 1) == 10.0);
}

TEST_CASE("fit_tree: unlimited depth reproduces distinct training targets") {
  Rng rng(0);
  const std::vector<double> x{0, 1, 2, 3, 4, 5};
  const std::vector<double> y{3, -1, 4, 1, -5, 9};
  const auto tree = fit_tree(x, 1, y, {}, rng);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(predict_tree(tree, std::vector<double>{x[i]}, 1) == y[i]);
}

TEST_CASE("predict_tree: leaf and routing rules") {
  Tree leaf;
  leaf.nodes.push_back({-1, 0, -1, -1, 3.2});
  CHECK(predict_tree(leaf, std::vector<double>{123.0}, 1) == 3.2);
  CHECK_THROWS_AS(predict_tree(leaf, std::vector<double>{1.0, 2.0}, 1),
                  DimensionMismatch);
}

TEST_CASE("fit_forest: constant targets, degenerate ensemble, determinism") {
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{5, 5, 5, 5};
  ForestParams params;
  params.n_trees = 10;
  const auto forest = fit_forest(x, 1, y, params);
  CHECK(predict_forest(forest, std::vector<double>{2.5}) == 5.0);

  ForestParams single;
  single.n_trees = 1;
  single.bootstrap = false;
  single.seed = 3;
  const std::vector<double> y2{0, 0, 10, 10};
  const auto f1 = fit_forest(x, 1, y2, single);
  Rng rng(derive_seed(single.seed, std::uint64_t{0}));
  const auto tree = fit_tree(x, 1, y2, single, rng);
  for (double q : {-1.0, 0.5, 1.7, 3.5})
    CHECK(predict_forest(f1, std::vector<double>{q}) ==
          predict_tree(tree, std::vector<double>{q}, 1));

  ForestParams seeded;
  seeded.n_trees = 8;
  seeded.seed = 42;
  const auto a = fit_forest(x, 1, y2, seeded);
  const auto b = fit_forest(x, 1, y2, seeded);
  REQUIRE(a.trees.size() == b.trees.size());
  for (std::size_t t = 0; t < a.trees.size(); ++t) {
    REQUIRE(a.trees[t].nodes.size() == b.trees[t].nodes.size());
    for (std::size_t n = 0; n < a.trees[t].nodes.size(); ++n) {
      CHECK(a.trees[t].nodes[n].feature == b.trees[t].nodes[n].feature);
      CHECK(a.trees[t].nodes[n].threshold == b.trees[t].nodes[n].threshold);
      CHECK(a.trees[t].nodes[n].value == b.trees[t].nodes[n].value);
    }
  }

  CHECK_THROWS_AS(fit_forest(std::vector<double>{}, 1, std::vector<double>{},
                             ForestParams{}),
                  EmptyTrainingSet);
}

TEST_CASE("predict_forest: bounded by the training target range") {
  Rng rng(17);
  const std::size_t m = 50;
  std::vector<double> x(m * 2), y(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i * 2] = rng.next_uniform(-5, 5);
    x[i * 2 + 1] = rng.next_uniform(-5, 5);
    y[i] = rng.next_uniform(0, 100);
  }
  ForestParams params;
  params.n_trees = 20;
  params.seed = 9;
  const auto forest = fit_forest(x, 2, y, params);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> q{rng.next_uniform(-50, 50),
                                rng.next_uniform(-50, 50)};
    const double pred = predict_forest(forest, q);
    CHECK(pred >= forest.target_min);
    CHECK(pred <= forest.target_max);
  }
}

TEST_CASE("fit_tree: matches the exhaustive brute-force search") {
  Rng rng(1234);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + rng.next_below(11);   // <= 12
    const std::size_t p = 1 + rng.next_below(2);    // <= 2
    std::vector<std::vector<double>> x(m, std::vector<double>(p));
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < p; ++j) x[i][j] = rng.next_uniform(-10, 10);
      y[i] = rng.next_uniform(-10, 10);
    }
    ForestParams params;
    params.bootstrap = false;
    params.max_depth = 1 + static_cast<int>(rng.next_below(2));  // <= 2

    Rng tree_rng(0);
    const auto tree = fit_tree(flatten(x), p, y, params, tree_rng);

    std::vector<std::size_t> rows(m);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const auto ref = oracle::exhaustive_tree(x, y, rows, 0, params.max_depth,
                                             params.min_samples_split,
                                             params.min_samples_leaf);
    CHECK(trees_match(tree, 0, ref));
    for (std::size_t i = 0; i < m; ++i)
      CHECK(predict_tree(tree, x[i], p) == oracle::predict(ref, x[i]));
  }
}

TEST_CASE("fit_tree: permutation of training rows leaves the tree unchanged") {
  Rng rng(555);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 4 + rng.next_below(12);
    const std::size_t p = 1 + rng.next_below(3);
    // integer-valued data so sums are exact under reordering
    std::vector<std::vector<double>> x(m, std::vector<double>(p));
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < p; ++j)
        x[i][j] = double(rng.next_below(8));
      y[i] = double(rng.next_below(16));
    }
    ForestParams params;
    params.bootstrap = false;

    Rng rng_a(0);
    const auto tree_a = fit_tree(flatten(x), p, y, params, rng_a);

    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = 0; i + 1 < m; ++i)
      std::swap(perm[i], perm[i + rng.next_below(m - i)]);
    std::vector<std::vector<double>> xp(m);
    std::vector<double> yp(m);
    for (std::size_t i = 0; i < m; ++i) {
      xp[i] = x[perm[i]];
      yp[i] = y[perm[i]];
    }
    Rng rng_b(0);
    const auto tree_b = fit_tree(flatten(xp), p, yp, params, rng_b);

    for (int probe = 0; probe < 50; ++probe) {
      std::vector<double> q(p);
      for (auto& v : q) v = rng.next_uniform(-1, 9);
      CHECK(predict_tree(tree_a, q, p) == predict_tree(tree_b, q, p));
    }
  }
}

TEST_CASE("fit_tree: max_features below 1 still draws at least one feature") {
  Rng rng(3);
  ForestParams params;
  params.max_features = 0.3;
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{0, 1, 2, 3};
  const auto tree = fit_tree(x, 1, y, params, rng);
  CHECK(tree.nodes.size() >= 1);
}
