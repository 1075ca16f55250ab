#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "localmine/lexicon.hpp"

namespace localmine {

/// t(trg | src) with an explicit NULL source token.
class TranslationTable {
 public:
  static constexpr const char* kNull = "<NULL>";

  Direction direction = Direction::JaToZh;

  double prob(const std::string& src, const std::string& trg) const;
  void set(const std::string& src, const std::string& trg, double p) { rows_[src][trg] = p; }
  const std::map<std::string, std::map<std::string, double>>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  /// `src<TAB>trg<TAB>p`, p with 6 decimals, sorted by src then trg.
  void write_tsv(std::ostream& out) const;
  static TranslationTable read_tsv(std::istream& in, Direction dir = Direction::JaToZh);

  bool operator==(const TranslationTable&) const = default;

 private:
  std::map<std::string, std::map<std::string, double>> rows_;
};

using TokenPair = std::pair<std::vector<std::string>, std::vector<std::string>>;

/// Called after each iteration with the corpus log-likelihood of the updated table.
using Model1Callback = std::function<void(int iteration, double log_likelihood, const TranslationTable&)>;

/// IBM Model 1 EM, uniform start over co-occurring pairs.
TranslationTable train_model1(const std::vector<TokenPair>& corpus, int iterations,
                              const Model1Callback& on_iteration = {}, Direction dir = Direction::JaToZh);

/// sum over pairs and target tokens of log(sum_e t(f|e) / (|src|+1)).
double model1_log_likelihood(const TranslationTable& table, const std::vector<TokenPair>& corpus);

}  // namespace localmine
