#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace localmine {

/// Character n-gram model, add-k smoothed, backing off to shorter
/// contexts when a context was never seen.
class CharLM {
 public:
  static constexpr char32_t kBos = 0x110000;
  static constexpr char32_t kEos = 0x110001;
  static constexpr char32_t kUnk = 0x110002;

  struct Context {
    std::uint64_t total = 0;
    std::map<char32_t, std::uint64_t> next;
    bool operator==(const Context&) const = default;
  };

  using ContextMap = std::map<std::u32string, Context, std::less<>>;

  CharLM() = default;
  CharLM(int order, double k);

  int order() const { return order_; }
  double k() const { return k_; }
  /// Observed characters plus the end symbol.
  const std::vector<char32_t>& vocabulary() const { return vocab_; }
  const ContextMap& contexts() const { return contexts_; }

  void add_sentence(std::u32string_view chars);
  /// P(w | history); only the last order-1 symbols of history matter.
  double prob(char32_t w, std::u32string_view history) const;

  /// Rebuilds a model from stored counts (used when loading).
  static CharLM from_counts(int order, double k, std::vector<char32_t> vocab, ContextMap ctx);

  bool operator==(const CharLM&) const = default;

 private:
  int order_ = 5;
  double k_ = 0.1;
  std::vector<char32_t> vocab_;  // sorted
  ContextMap contexts_;
};

CharLM train_char_lm(const std::vector<std::string>& corpus, int n = 5, double k = 0.1);

/// Mean natural-log probability per character, end symbol included.
double lm_score(const CharLM& lm, std::string_view text);

}  // namespace localmine
