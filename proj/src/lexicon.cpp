#include "localmine/lexicon.hpp"

#include <fstream>
#include <unordered_map>

#include "localmine/error.hpp"
#include "localmine/utf8.hpp"

namespace localmine {

bool Lexicon::add(const std::string& ja, const std::string& zh) {
  if (ja.empty() || zh.empty()) return false;
  if (!pairs_.emplace(ja, zh).second) return false;
  entries_.push_back({ja, zh});
  index_ja_[ja].push_back(zh);
  index_zh_[zh].push_back(ja);
  vocab_ja_.insert(ja);
  vocab_zh_.insert(zh);
  return true;
}

const std::vector<std::string>& Lexicon::translations(std::string_view token, Direction dir) const {
  static const std::vector<std::string> none;
  const auto& index = dir == Direction::JaToZh ? index_ja_ : index_zh_;
  const auto it = index.find(std::string(token));
  return it == index.end() ? none : it->second;
}

std::vector<std::string> segment_words(std::string_view text, Language lang, const Lexicon& lex) {
  return segment_words(text, lex.headwords(lang));
}

std::vector<LexiconEntry> reduce_dictionary(const std::vector<LexiconEntry>& raw, const Segmenter& seg_ja,
                                            const Segmenter& seg_zh) {
  Lexicon seen;
  std::vector<LexiconEntry> out;
  for (const auto& e : raw) {
    if (seg_ja.segment(e.ja).size() != 1 || seg_zh.segment(e.zh).size() != 1) continue;
    if (seen.add(e.ja, e.zh)) out.push_back(e);
  }
  return out;
}

Lexicon augment_with_char_map(const std::vector<LexiconEntry>& entries, const std::vector<LexiconEntry>& char_map,
                              std::vector<CharMapRowError>* errors) {
  Lexicon lex;
  for (const auto& e : entries) lex.add(e.ja, e.zh);
  for (std::size_t i = 0; i < char_map.size(); ++i) {
    const auto& c = char_map[i];
    if (utf8::length(c.ja) != 1 || utf8::length(c.zh) != 1) {
      if (errors) errors->push_back({i, "character map row is not a single character pair: " + c.ja + "\t" + c.zh});
      continue;
    }
    lex.add(c.ja, c.zh);
  }
  return lex;
}

std::size_t greedy_match_count(const std::vector<std::string>& src, const std::vector<std::string>& trg,
                               const Lexicon& lex, Direction dir) {
  if (src.empty() || trg.empty()) return 0;
  std::unordered_map<std::string_view, int> remaining;
  for (const auto& t : trg) ++remaining[t];
  std::size_t matched = 0;
  for (const auto& s : src) {
    for (const auto& cand : lex.translations(s, dir)) {
      const auto it = remaining.find(cand);
      if (it != remaining.end() && it->second > 0) {
        --it->second;
        ++matched;
        break;
      }
    }
  }
  return matched;
}

double coverage(const std::vector<std::string>& src, const std::vector<std::string>& trg, const Lexicon& lex,
                Direction dir) {
  if (src.empty()) return 0.0;
  return static_cast<double>(greedy_match_count(src, trg, lex, dir)) / static_cast<double>(src.size());
}

std::vector<LexiconEntry> read_pair_tsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FatalError("cannot read " + path);
  std::vector<LexiconEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    auto end = line.find('\t', tab + 1);
    if (end == std::string::npos) end = line.size();
    std::string ja = normalize_text(std::string_view(line).substr(0, tab));
    std::string zh = normalize_text(std::string_view(line).substr(tab + 1, end - tab - 1));
    if (ja.empty() || zh.empty()) continue;
    out.push_back({std::move(ja), std::move(zh)});
  }
  return out;
}

}  // namespace localmine
