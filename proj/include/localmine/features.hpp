#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "localmine/char_lm.hpp"
#include "localmine/lexicon.hpp"
#include "localmine/model1.hpp"
#include "localmine/text.hpp"

namespace localmine {

inline constexpr std::size_t kNumFeatures = 12;

inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "len_ja",      "len_zh",      "len_ratio", "tok_ratio", "cov_j2z",   "cov_z2j",
    "avgmaxp_j2z", "avgmaxp_z2j", "lm_ja",     "lm_zh",     "num_match", "punct_diff"};

struct FeatureVector {
  std::array<double, kNumFeatures> values{};

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const FeatureVector&) const = default;
};

/// Everything feature extraction needs besides the sentences.
struct FeatureModels {
  const TranslationTable* t_j2z = nullptr;
  const TranslationTable* t_z2j = nullptr;
  const CharLM* lm_ja = nullptr;
  const CharLM* lm_zh = nullptr;
  const Lexicon* lex = nullptr;
};

FeatureVector extract_features(const Sentence& ja, const Sentence& zh, const FeatureModels& models);

/// 1 iff the multisets of maximal ASCII digit runs agree.
double digit_runs_match(std::string_view a, std::string_view b);
/// Count of sentence-final and bracket punctuation.
std::size_t punctuation_count(std::string_view s);

struct TextPair {
  std::string ja;
  std::string zh;
  bool operator==(const TextPair&) const = default;
};

struct LabeledPair {
  std::string ja;
  std::string zh;
  int label = 0;
};

using Tokenizer = std::function<std::vector<std::string>(std::string_view)>;

/// One negative per positive: random other target, word-shuffled target,
/// or target cut to its first 40% of characters. Output alternates
/// positive, negative. Throws with fewer than 10 positives.
std::vector<LabeledPair> synthesize_negatives(const std::vector<TextPair>& positives, std::uint64_t seed,
                                              const Tokenizer& tokenize_zh);

}  // namespace localmine
