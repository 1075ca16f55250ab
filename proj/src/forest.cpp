#include "localmine/forest.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "localmine/error.hpp"
#include "localmine/hash.hpp"

namespace localmine {

int DecisionTree::predict(const FeatureVector& x) const {
  if (nodes.empty()) throw Error("empty decision tree");
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].vote;
}

void ForestConfig::validate() const {
  if (trees < 1) throw FatalError("forest: trees must be at least 1");
  if (max_depth < 1) throw FatalError("forest: max_depth must be at least 1");
  if (features_per_split < 1 || features_per_split > static_cast<int>(kNumFeatures))
    throw FatalError("forest: features_per_split must be in [1, 12]");
  if (min_samples_split < 2) throw FatalError("forest: min_samples_split must be at least 2");
}

double Forest::score(const FeatureVector& x) const {
  if (trees.empty()) throw Error("forest has no trees");
  std::size_t votes = 0;
  for (const auto& t : trees) votes += static_cast<std::size_t>(t.predict(x));
  return static_cast<double>(votes) / static_cast<double>(trees.size());
}

namespace {

double gini(std::size_t pos, std::size_t n) {
  if (n == 0) return 0.0;
  const double p = static_cast<double>(pos) / static_cast<double>(n);
  return 2.0 * p * (1.0 - p);
}

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<LabeledFeatures>& rows, const ForestConfig& cfg, std::mt19937_64& rng)
      : rows_(rows), cfg_(cfg), rng_(rng) {}

  DecisionTree build(std::vector<std::size_t> sample) {
    DecisionTree tree;
    grow(tree, sample, 0);
    return tree;
  }

 private:
  int grow(DecisionTree& tree, std::vector<std::size_t>& idx, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    std::size_t pos = 0;
    for (std::size_t i : idx) pos += static_cast<std::size_t>(rows_[i].label);
    const std::size_t n = idx.size();
    const int vote = pos * 2 > n ? 1 : 0;
    if (depth >= cfg_.max_depth || pos == 0 || pos == n || n < static_cast<std::size_t>(cfg_.min_samples_split)) {
      tree.nodes[static_cast<std::size_t>(id)].vote = vote;
      return id;
    }

    std::array<std::size_t, kNumFeatures> feats{};
    std::iota(feats.begin(), feats.end(), 0);
    const auto m = static_cast<std::size_t>(cfg_.features_per_split);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + bounded_uniform(rng_, kNumFeatures - i);
      std::swap(feats[i], feats[j]);
    }

    const double parent = gini(pos, n);
    double best = parent;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, int>> col(n);
    for (std::size_t fi = 0; fi < m; ++fi) {
      const std::size_t f = feats[fi];
      for (std::size_t i = 0; i < n; ++i) col[i] = {rows_[idx[i]].x[f], rows_[idx[i]].label};
      std::sort(col.begin(), col.end());
      std::size_t left_pos = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_pos += static_cast<std::size_t>(col[i].second);
        if (col[i].first == col[i + 1].first) continue;
        const std::size_t nl = i + 1;
        const std::size_t nr = n - nl;
        const double g = (static_cast<double>(nl) * gini(left_pos, nl) +
                          static_cast<double>(nr) * gini(pos - left_pos, nr)) /
                         static_cast<double>(n);
        if (g < best) {
          best = g;
          best_feature = static_cast<int>(f);
          best_threshold = col[i].first + (col[i + 1].first - col[i].first) / 2.0;
          if (!(best_threshold < col[i + 1].first)) best_threshold = col[i].first;
        }
      }
    }
    if (best_feature < 0) {
      tree.nodes[static_cast<std::size_t>(id)].vote = vote;
      return id;
    }

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t i : idx) {
      (rows_[i].x[static_cast<std::size_t>(best_feature)] <= best_threshold ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    const int l = grow(tree, left, depth + 1);
    const int r = grow(tree, right, depth + 1);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    node.vote = vote;
    return id;
  }

  const std::vector<LabeledFeatures>& rows_;
  const ForestConfig& cfg_;
  std::mt19937_64& rng_;
};

}  // namespace

Forest train_forest(const std::vector<LabeledFeatures>& rows, const ForestConfig& cfg) {
  cfg.validate();
  bool has0 = false;
  bool has1 = false;
  for (const auto& r : rows) {
    if (r.label != 0 && r.label != 1) throw Error("train_forest: labels must be 0 or 1");
    (r.label ? has1 : has0) = true;
  }
  if (!has0 || !has1) throw Error("train_forest: both classes are required");

  std::mt19937_64 rng(cfg.seed);
  Forest forest;
  forest.trees.reserve(static_cast<std::size_t>(cfg.trees));
  TreeBuilder builder(rows, cfg, rng);
  for (int t = 0; t < cfg.trees; ++t) {
    std::vector<std::size_t> sample(rows.size());
    for (auto& s : sample) s = bounded_uniform(rng, rows.size());
    forest.trees.push_back(builder.build(std::move(sample)));
  }
  return forest;
}

}  // namespace localmine
