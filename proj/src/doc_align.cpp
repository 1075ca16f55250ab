#include "localmine/doc_align.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "localmine/error.hpp"
#include "localmine/url.hpp"

namespace localmine {

void DocWeights::validate() const {
  if (dict < 0 || url < 0 || structure < 0 || length < 0) throw FatalError("document weights must be non-negative");
  if (std::abs(dict + url + structure + length - 1.0) > 1e-9) throw FatalError("document weights must sum to 1");
}

std::string strip_language_markers(const std::string& url, const DocAlignConfig& cfg) {
  std::string path;
  std::string query;
  if (const auto u = Url::parse(url)) {
    path = u->path;
    query = u->query;
  } else {
    path = url;
  }
  // A trailing sentinel lets "/ja" at the end of a path match "/ja/".
  std::string p = path + "/";
  for (const auto& marker : cfg.path_markers) {
    std::size_t pos = 0;
    while ((pos = p.find(marker, pos)) != std::string::npos) p.replace(pos, marker.size(), "/");
  }
  p.pop_back();
  if (p.empty()) p = "/";

  std::string kept;
  std::stringstream qs(query);
  std::string item;
  while (std::getline(qs, item, '&')) {
    if (item.empty()) continue;
    const std::string key = item.substr(0, item.find('='));
    if (std::find(cfg.query_keys.begin(), cfg.query_keys.end(), key) != cfg.query_keys.end()) continue;
    if (!kept.empty()) kept += '&';
    kept += item;
  }
  return kept.empty() ? p : p + "?" + kept;
}

double url_similarity(const std::string& url_ja, const std::string& url_zh, const DocAlignConfig& cfg) {
  return edit_similarity(strip_language_markers(url_ja, cfg), strip_language_markers(url_zh, cfg));
}

namespace {

std::vector<std::string> token_bag(const Document& d) {
  std::vector<std::string> out;
  for (const auto& s : d.sentences) out.insert(out.end(), s.tokens.begin(), s.tokens.end());
  return out;
}

double harmonic(double a, double b) { return a + b > 0.0 ? 2.0 * a * b / (a + b) : 0.0; }

double dict_sim_of(const std::vector<std::string>& ja, const std::vector<std::string>& zh, const Lexicon& lex) {
  return harmonic(coverage(ja, zh, lex, Direction::JaToZh), coverage(zh, ja, lex, Direction::ZhToJa));
}

double length_ratio(std::size_t a, std::size_t b) {
  const auto hi = std::max(a, b);
  return hi ? static_cast<double>(std::min(a, b)) / static_cast<double>(hi) : 0.0;
}

double combine(const DocFeatures& f, const DocWeights& w) {
  return w.dict * f.dict_sim + w.url * f.url_sim + w.structure * f.struct_sim + w.length * f.len_ratio;
}

}  // namespace

double dictionary_similarity(const Document& ja, const Document& zh, const Lexicon& lex) {
  return dict_sim_of(token_bag(ja), token_bag(zh), lex);
}

DocScore doc_similarity(const Document& ja, const Document& zh, const Lexicon& lex, const DocAlignConfig& cfg) {
  DocScore out;
  if (ja.raw_char_count == 0 || zh.raw_char_count == 0) return out;
  out.features.dict_sim = dictionary_similarity(ja, zh, lex);
  out.features.url_sim = url_similarity(ja.url, zh.url, cfg);
  out.features.struct_sim = edit_similarity(ja.tag_digest, zh.tag_digest);
  out.features.len_ratio = length_ratio(ja.raw_char_count, zh.raw_char_count);
  out.score = combine(out.features, cfg.weights);
  return out;
}

std::vector<MatchCandidate> greedy_match(std::vector<MatchCandidate> candidates, double min_score) {
  std::sort(candidates.begin(), candidates.end(), [](const MatchCandidate& a, const MatchCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.url_sim != b.url_sim) return a.url_sim > b.url_sim;
    if (a.ja_url != b.ja_url) return a.ja_url < b.ja_url;
    if (a.zh_url != b.zh_url) return a.zh_url < b.zh_url;
    if (a.ja_index != b.ja_index) return a.ja_index < b.ja_index;
    return a.zh_index < b.zh_index;
  });
  std::vector<char> used_ja;
  std::vector<char> used_zh;
  std::vector<MatchCandidate> out;
  for (auto& c : candidates) {
    if (c.score < min_score) break;
    if (c.ja_index >= used_ja.size()) used_ja.resize(c.ja_index + 1, 0);
    if (c.zh_index >= used_zh.size()) used_zh.resize(c.zh_index + 1, 0);
    if (used_ja[c.ja_index] || used_zh[c.zh_index]) continue;
    used_ja[c.ja_index] = used_zh[c.zh_index] = 1;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<DocPair> match_documents(const std::vector<Document>& ja_docs, const std::vector<Document>& zh_docs,
                                     const Lexicon& lex, const DocAlignConfig& cfg) {
  cfg.weights.validate();
  std::vector<std::vector<std::string>> ja_bags;
  std::vector<std::vector<std::string>> zh_bags;
  for (const auto& d : ja_docs) ja_bags.push_back(token_bag(d));
  for (const auto& d : zh_docs) zh_bags.push_back(token_bag(d));

  std::vector<MatchCandidate> candidates;
  std::vector<DocFeatures> features;
  for (std::size_t i = 0; i < ja_docs.size(); ++i) {
    for (std::size_t j = 0; j < zh_docs.size(); ++j) {
      const Document& a = ja_docs[i];
      const Document& b = zh_docs[j];
      if (a.raw_char_count == 0 || b.raw_char_count == 0) continue;
      DocFeatures f;
      f.url_sim = url_similarity(a.url, b.url, cfg);
      f.dict_sim = dict_sim_of(ja_bags[i], zh_bags[j], lex);
      if (f.url_sim < cfg.prefilter_url && f.dict_sim < cfg.prefilter_dict) continue;
      f.struct_sim = edit_similarity(a.tag_digest, b.tag_digest);
      f.len_ratio = length_ratio(a.raw_char_count, b.raw_char_count);
      MatchCandidate c;
      c.ja_index = i;
      c.zh_index = j;
      c.score = combine(f, cfg.weights);
      c.url_sim = f.url_sim;
      c.ja_url = a.url;
      c.zh_url = b.url;
      features.push_back(f);
      candidates.push_back(std::move(c));
    }
  }
  std::vector<std::vector<int>> slot(ja_docs.size(), std::vector<int>(zh_docs.size(), -1));
  for (std::size_t k = 0; k < candidates.size(); ++k) slot[candidates[k].ja_index][candidates[k].zh_index] = static_cast<int>(k);

  std::vector<DocPair> out;
  for (const auto& c : greedy_match(std::move(candidates), cfg.min_score)) {
    out.push_back({c.ja_index, c.zh_index, c.score, features[static_cast<std::size_t>(slot[c.ja_index][c.zh_index])]});
  }
  return out;
}

void write_docpair_audit(const std::string& path, const std::vector<DocPair>& pairs,
                         const std::vector<Document>& ja_docs, const std::vector<Document>& zh_docs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FatalError("cannot write " + path);
  for (const auto& p : pairs) {
    nlohmann::ordered_json j;
    j["url_ja"] = ja_docs[p.ja_index].url;
    j["url_zh"] = zh_docs[p.zh_index].url;
    j["score"] = p.score;
    j["dict_sim"] = p.features.dict_sim;
    j["url_sim"] = p.features.url_sim;
    j["struct_sim"] = p.features.struct_sim;
    j["len_ratio"] = p.features.len_ratio;
    out << j.dump() << '\n';
  }
}

}  // namespace localmine
