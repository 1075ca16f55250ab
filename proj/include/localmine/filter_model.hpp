#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "localmine/char_lm.hpp"
#include "localmine/features.hpp"
#include "localmine/forest.hpp"
#include "localmine/lexicon.hpp"
#include "localmine/model1.hpp"

namespace localmine {

struct FeatureStats {
  std::array<double, kNumFeatures> mean{};
  std::array<double, kNumFeatures> stddev{};
  bool operator==(const FeatureStats&) const = default;
};

FeatureStats feature_stats(const std::vector<LabeledFeatures>& rows);

struct FilterTrainConfig {
  int model1_iterations = 5;
  int lm_order = 5;
  double lm_k = 0.1;
  /// Forest features are computed out-of-fold: each fold is scored by
  /// models trained on the remaining folds.
  int folds = 5;
  ForestConfig forest;
  std::uint64_t seed = 1;
};

struct FilterModel {
  static constexpr int kVersion = 1;

  TranslationTable t_j2z;
  TranslationTable t_z2j;
  CharLM lm_ja;
  CharLM lm_zh;
  Forest forest;
  FeatureStats stats;
  std::uint64_t seed = 0;
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;

  FeatureModels models(const Lexicon& lex) const { return {&t_j2z, &t_z2j, &lm_ja, &lm_zh, &lex}; }

  nlohmann::json to_json() const;
  static FilterModel from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static FilterModel load(const std::string& path);
  /// SHA-256 of the serialized model.
  std::string digest() const;

  bool operator==(const FilterModel&) const = default;
};

/// Sentence with lexicon tokens for `lang`.
Sentence make_sentence(const std::string& text, Language lang, const Lexicon& lex);

/// Translation tables and LMs from all positives; the forest learns from
/// out-of-fold features of the positives and their seeded negatives.
FilterModel train_filter(const std::vector<TextPair>& positives, const Lexicon& lex, const FilterTrainConfig& cfg = {});
/// Same, from explicit labeled rows (label 1 rows feed the side models).
FilterModel train_filter_labeled(const std::vector<LabeledPair>& labeled, const Lexicon& lex,
                                 const FilterTrainConfig& cfg = {});

/// Feature rows for labeled pairs under already trained models.
std::vector<LabeledFeatures> featurize(const std::vector<LabeledPair>& rows, const FeatureModels& models);

double score_pair(const FilterModel& model, const FeatureVector& fv);

}  // namespace localmine
