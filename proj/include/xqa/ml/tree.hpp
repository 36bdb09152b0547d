#pragma once

// CART-style classification trees (Gini impurity, best single-feature binary
// split) and bagged random forests built from them.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "xqa/ml/data.hpp"

namespace xqa::ml {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0;
  int left = -1;  // x[feature] <= threshold
  int right = -1;
  Probabilities counts{};  // weighted class counts of training rows reaching the node

  bool operator==(const TreeNode&) const = default;
};

struct Tree {
  std::vector<TreeNode> nodes;

  const TreeNode& leaf_for(std::span<const double> x) const {
    const TreeNode* n = &nodes.at(0);
    while (n->feature >= 0) n = &nodes[x[n->feature] <= n->threshold ? n->left : n->right];
    return *n;
  }

  /// Class proportions of the leaf the input falls into.
  Probabilities distribution(std::span<const double> x) const {
    auto p = leaf_for(x).counts;
    double total = p[0] + p[1] + p[2];
    for (auto& v : p) v /= total;
    return p;
  }

  OutcomeClass predict(std::span<const double> x) const { return argmax(distribution(x)); }

  bool operator==(const Tree&) const = default;
};

struct TreeGrowth {
  int max_depth = 0;             // 0 = unbounded
  std::size_t max_features = 0;  // features tried per split; 0 or >= cols = all
};

namespace detail {

inline double gini(const Probabilities& c) {
  double total = c[0] + c[1] + c[2];
  if (total <= 0) return 0;
  double s = 0;
  for (double v : c) s += (v / total) * (v / total);
  return 1.0 - s;
}

class TreeGrower {
 public:
  TreeGrower(const LabeledData& data, std::span<const double> sw, const TreeGrowth& growth, Rng& rng)
      : data_(data), sw_(sw), growth_(growth), rng_(rng) {}

  Tree grow(std::vector<std::size_t> rows) {
    tree_.nodes.clear();
    build(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0;
    double gain = 0;
  };

  int build(std::vector<std::size_t> rows, int depth) {
    int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    Probabilities counts{};
    for (auto r : rows) counts[index_of(data_.y[r])] += sw_[r];
    tree_.nodes[id].counts = counts;
    std::size_t classes = (counts[0] > 0) + (counts[1] > 0) + (counts[2] > 0);
    if (classes <= 1 || rows.size() < 2 || (growth_.max_depth > 0 && depth >= growth_.max_depth)) return id;

    Split best = find_split(rows, counts);
    if (best.feature < 0) return id;
    std::vector<std::size_t> left, right;
    for (auto r : rows) (data_.row(r)[best.feature] <= best.threshold ? left : right).push_back(r);
    int l = build(std::move(left), depth + 1);
    int r = build(std::move(right), depth + 1);
    tree_.nodes[id].feature = best.feature;
    tree_.nodes[id].threshold = best.threshold;
    tree_.nodes[id].left = l;
    tree_.nodes[id].right = r;
    return id;
  }

  std::vector<std::size_t> candidate_features() {
    std::vector<std::size_t> f(data_.cols);
    std::iota(f.begin(), f.end(), 0);
    std::size_t m = growth_.max_features;
    if (m == 0 || m >= data_.cols) return f;
    for (std::size_t i = 0; i < m; ++i) std::swap(f[i], f[i + rng_.uniform_index(f.size() - i)]);
    f.resize(m);
    std::sort(f.begin(), f.end());
    return f;
  }

  Split find_split(const std::vector<std::size_t>& rows, const Probabilities& parent) {
    double total = parent[0] + parent[1] + parent[2];
    double parent_impurity = gini(parent) * total;
    Split best;
    std::vector<std::pair<double, std::size_t>> values(rows.size());
    for (auto f : candidate_features()) {
      for (std::size_t i = 0; i < rows.size(); ++i) values[i] = {data_.row(rows[i])[f], rows[i]};
      std::sort(values.begin(), values.end());
      Probabilities left{};
      for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        left[index_of(data_.y[values[i].second])] += sw_[values[i].second];
        if (values[i].first == values[i + 1].first) continue;
        Probabilities right{parent[0] - left[0], parent[1] - left[1], parent[2] - left[2]};
        double wl = left[0] + left[1] + left[2];
        double wr = total - wl;
        double gain = parent_impurity - gini(left) * wl - gini(right) * wr;
        if (best.feature < 0 || gain > best.gain + 1e-12) {
          best = {static_cast<int>(f), 0.5 * (values[i].first + values[i + 1].first), gain};
        }
      }
    }
    return best;
  }

  const LabeledData& data_;
  std::span<const double> sw_;
  TreeGrowth growth_;
  Rng& rng_;
  Tree tree_;
};

}  // namespace detail

inline Tree grow_tree(const LabeledData& data, std::span<const double> sample_weight,
                      std::vector<std::size_t> rows, const TreeGrowth& growth, Rng& rng) {
  return detail::TreeGrower(data, sample_weight, growth, rng).grow(std::move(rows));
}

inline std::vector<std::size_t> all_rows(const LabeledData& data) {
  std::vector<std::size_t> rows(data.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

/// Single tree over every row and every feature. Uses the same random stream
/// as the first tree of a forest with the same seed.
inline Tree fit_decision_tree(const LabeledData& data, std::span<const double> sample_weight, int max_depth,
                              std::uint64_t seed) {
  Rng rng(splitmix64(seed));
  return grow_tree(data, sample_weight, all_rows(data), {max_depth, 0}, rng);
}

struct ForestGrowth {
  int n_trees = 10;
  int max_depth = 0;
  std::size_t max_features = 0;  // 0 = ceil(sqrt(cols))
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

inline std::size_t default_max_features(std::size_t cols) {
  auto m = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(cols))));
  return std::max<std::size_t>(1, m);
}

inline std::vector<Tree> fit_random_forest(const LabeledData& data, std::span<const double> sample_weight,
                                           const ForestGrowth& g) {
  std::vector<Tree> trees;
  std::size_t m = g.max_features == 0 ? default_max_features(data.cols) : g.max_features;
  for (int t = 0; t < g.n_trees; ++t) {
    Rng rng(splitmix64(g.seed + static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> rows;
    if (g.bootstrap) {
      rows.resize(data.rows());
      for (auto& r : rows) r = rng.uniform_index(data.rows());
    } else {
      rows = all_rows(data);
    }
    trees.push_back(grow_tree(data, sample_weight, std::move(rows), {g.max_depth, m}, rng));
  }
  return trees;
}

/// Vote proportions over the trees.
inline Probabilities forest_probabilities(const std::vector<Tree>& trees, std::span<const double> x) {
  Probabilities p{};
  for (const auto& t : trees) p[index_of(t.predict(x))] += 1.0;
  for (auto& v : p) v /= static_cast<double>(trees.size());
  return p;
}

}  // namespace xqa::ml
