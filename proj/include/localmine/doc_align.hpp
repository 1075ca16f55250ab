#pragma once

#include <string>
#include <vector>

#include "localmine/lexicon.hpp"
#include "localmine/text.hpp"

namespace localmine {

struct DocWeights {
  double dict = 0.5;
  double url = 0.2;
  double structure = 0.2;
  double length = 0.1;

  /// Throws FatalError unless all weights are non-negative and sum to 1.
  void validate() const;
};

struct DocAlignConfig {
  DocWeights weights;
  double min_score = 0.4;
  double prefilter_url = 0.3;
  double prefilter_dict = 0.1;
  std::vector<std::string> path_markers = {"/ja/", "/zh/", "/jp/", "/cn/", "/zh-cn/", "/zh-hans/"};
  std::vector<std::string> query_keys = {"lang"};
};

struct DocFeatures {
  double dict_sim = 0.0;
  double url_sim = 0.0;
  double struct_sim = 0.0;
  double len_ratio = 0.0;
};

struct DocScore {
  double score = 0.0;
  DocFeatures features;
};

struct DocPair {
  std::size_t ja_index = 0;  // into the JA document list
  std::size_t zh_index = 0;
  double score = 0.0;
  DocFeatures features;
};

/// Path and query with language markers removed.
std::string strip_language_markers(const std::string& url, const DocAlignConfig& cfg);

/// 1 - edit distance / max length; 1 for two empty sequences.
template <typename Seq>
double edit_similarity(const Seq& a, const Seq& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n == 0 && m == 0) return 1.0;
  std::vector<std::size_t> row(m + 1);
  for (std::size_t j = 0; j <= m; ++j) row[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return 1.0 - static_cast<double>(row[m]) / static_cast<double>(std::max(n, m));
}

double url_similarity(const std::string& url_ja, const std::string& url_zh, const DocAlignConfig& cfg);
double dictionary_similarity(const Document& ja, const Document& zh, const Lexicon& lex);

/// Expects segmented documents (sentence tokens filled).
DocScore doc_similarity(const Document& ja, const Document& zh, const Lexicon& lex, const DocAlignConfig& cfg = {});

struct MatchCandidate {
  std::size_t ja_index = 0;
  std::size_t zh_index = 0;
  double score = 0.0;
  double url_sim = 0.0;
  std::string ja_url;
  std::string zh_url;
};

/// Greedy one-to-one selection by score desc, then url_sim desc, then
/// URLs ascending. Returns selected candidates in selection order.
std::vector<MatchCandidate> greedy_match(std::vector<MatchCandidate> candidates, double min_score);

std::vector<DocPair> match_documents(const std::vector<Document>& ja_docs, const std::vector<Document>& zh_docs,
                                     const Lexicon& lex, const DocAlignConfig& cfg = {});

/// One JSON object per accepted pair with the four features.
void write_docpair_audit(const std::string& path, const std::vector<DocPair>& pairs,
                         const std::vector<Document>& ja_docs, const std::vector<Document>& zh_docs);

}  // namespace localmine
