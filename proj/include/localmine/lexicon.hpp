#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "localmine/text.hpp"

namespace localmine {

struct LexiconEntry {
  std::string ja;
  std::string zh;

  bool operator==(const LexiconEntry&) const = default;
};

enum class Direction : std::uint8_t { JaToZh, ZhToJa };

/// One-to-one word-pair table with both lookup directions. Translation
/// lists keep insertion order, which fixes the greedy matching preference.
class Lexicon {
 public:
  /// Returns false (and changes nothing) for an existing pair or an empty side.
  bool add(const std::string& ja, const std::string& zh);

  const std::vector<LexiconEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  const std::vector<std::string>& translations(std::string_view token, Direction dir) const;
  const Vocabulary& headwords(Language lang) const { return lang == Language::Zh ? vocab_zh_ : vocab_ja_; }

 private:
  struct PairHash {
    std::size_t operator()(const std::pair<std::string, std::string>& p) const {
      return std::hash<std::string>{}(p.first) * 1000003u ^ std::hash<std::string>{}(p.second);
    }
  };

  std::vector<LexiconEntry> entries_;
  std::unordered_set<std::pair<std::string, std::string>, PairHash> pairs_;
  std::unordered_map<std::string, std::vector<std::string>> index_ja_;
  std::unordered_map<std::string, std::vector<std::string>> index_zh_;
  Vocabulary vocab_ja_;
  Vocabulary vocab_zh_;
};

/// Tokenizes with the lexicon's headwords for `lang`.
std::vector<std::string> segment_words(std::string_view text, Language lang, const Lexicon& lex);

/// Keeps entries whose headwords are a single token on both sides;
/// deduplicated, first-occurrence order.
std::vector<LexiconEntry> reduce_dictionary(const std::vector<LexiconEntry>& raw, const Segmenter& seg_ja,
                                            const Segmenter& seg_zh);

struct CharMapRowError {
  std::size_t row = 0;  // 0-based index into the char map
  std::string message;
};

/// Union of word entries and single-character correspondences.
/// Rows whose sides are not exactly one scalar value are skipped and
/// reported through `errors`.
Lexicon augment_with_char_map(const std::vector<LexiconEntry>& entries, const std::vector<LexiconEntry>& char_map,
                              std::vector<CharMapRowError>* errors = nullptr);

/// Number of source tokens matched greedily (left to right, first
/// unconsumed translation in lexicon order) against the target multiset.
std::size_t greedy_match_count(const std::vector<std::string>& src, const std::vector<std::string>& trg,
                               const Lexicon& lex, Direction dir);

/// matched / |src|; 0 for an empty source.
double coverage(const std::vector<std::string>& src, const std::vector<std::string>& trg, const Lexicon& lex,
                Direction dir);

/// UTF-8 TSV `ja<TAB>zh`, LF, no header. Both sides are normalized;
/// rows without two non-empty columns are skipped.
std::vector<LexiconEntry> read_pair_tsv(const std::string& path);

}  // namespace localmine
