#pragma once

#include <cstdint>
#include <vector>

#include "localmine/features.hpp"

namespace localmine {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int vote = 0;
  bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  /// Goes left when x[feature] <= threshold.
  int predict(const FeatureVector& x) const;
  bool operator==(const DecisionTree&) const = default;
};

struct ForestConfig {
  int trees = 100;
  int max_depth = 8;
  int features_per_split = 3;
  int min_samples_split = 2;
  std::uint64_t seed = 1;

  void validate() const;
};

struct LabeledFeatures {
  FeatureVector x;
  int label = 0;
};

struct Forest {
  std::vector<DecisionTree> trees;

  /// Fraction of trees voting 1.
  double score(const FeatureVector& x) const;
  bool operator==(const Forest&) const = default;
};

/// Bagged CART ensemble with Gini splits on random feature subsets.
/// Throws unless both labels occur.
Forest train_forest(const std::vector<LabeledFeatures>& rows, const ForestConfig& cfg = {});

}  // namespace localmine
