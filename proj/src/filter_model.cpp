#include "localmine/filter_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "localmine/error.hpp"
#include "localmine/hash.hpp"

namespace localmine {

using nlohmann::json;

FeatureStats feature_stats(const std::vector<LabeledFeatures>& rows) {
  FeatureStats s;
  if (rows.empty()) return s;
  const double n = static_cast<double>(rows.size());
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    double sum = 0.0;
    for (const auto& r : rows) sum += r.x[f];
    const double mean = sum / n;
    double var = 0.0;
    for (const auto& r : rows) var += (r.x[f] - mean) * (r.x[f] - mean);
    s.mean[f] = mean;
    s.stddev[f] = std::sqrt(var / n);
  }
  return s;
}

Sentence make_sentence(const std::string& text, Language lang, const Lexicon& lex) {
  Sentence s = Sentence::from_text(text);
  s.tokens = segment_words(text, lang, lex);
  return s;
}

std::vector<LabeledFeatures> featurize(const std::vector<LabeledPair>& rows, const FeatureModels& models) {
  std::vector<LabeledFeatures> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    const Sentence ja = make_sentence(r.ja, Language::Ja, *models.lex);
    const Sentence zh = make_sentence(r.zh, Language::Zh, *models.lex);
    out.push_back({extract_features(ja, zh, models), r.label});
  }
  return out;
}

namespace {

struct SideModels {
  TranslationTable t_j2z;
  TranslationTable t_z2j;
  CharLM lm_ja;
  CharLM lm_zh;
};

SideModels fit_side_models(const std::vector<TextPair>& pairs, const Lexicon& lex, const FilterTrainConfig& cfg) {
  std::vector<TokenPair> j2z;
  std::vector<TokenPair> z2j;
  std::vector<std::string> ja_text;
  std::vector<std::string> zh_text;
  for (const auto& p : pairs) {
    auto ja = segment_words(p.ja, Language::Ja, lex);
    auto zh = segment_words(p.zh, Language::Zh, lex);
    z2j.emplace_back(zh, ja);
    j2z.emplace_back(std::move(ja), std::move(zh));
    ja_text.push_back(p.ja);
    zh_text.push_back(p.zh);
  }
  return {train_model1(j2z, cfg.model1_iterations, {}, Direction::JaToZh),
          train_model1(z2j, cfg.model1_iterations, {}, Direction::ZhToJa),
          train_char_lm(ja_text, cfg.lm_order, cfg.lm_k), train_char_lm(zh_text, cfg.lm_order, cfg.lm_k)};
}

}  // namespace

FilterModel train_filter(const std::vector<TextPair>& positives, const Lexicon& lex, const FilterTrainConfig& cfg) {
  if (positives.empty()) throw Error("train_filter: no training pairs");
  const auto labeled = synthesize_negatives(
      positives, cfg.seed, [&lex](std::string_view s) { return segment_words(s, Language::Zh, lex); });
  return train_filter_labeled(labeled, lex, cfg);
}

FilterModel train_filter_labeled(const std::vector<LabeledPair>& labeled, const Lexicon& lex,
                                 const FilterTrainConfig& cfg) {
  cfg.forest.validate();
  if (cfg.folds < 2) throw Error("train_filter: folds must be at least 2");
  std::vector<TextPair> positives;
  for (const auto& r : labeled)
    if (r.label == 1) positives.push_back({r.ja, r.zh});
  if (positives.size() < 2) throw Error("train_filter: need at least two positive pairs");

  // Rows 2k and 2k+1 share a fold so a positive and its negative stay together.
  const std::size_t groups = (labeled.size() + 1) / 2;
  const std::size_t folds = std::min<std::size_t>(static_cast<std::size_t>(cfg.folds), groups);
  std::vector<LabeledFeatures> rows(labeled.size());
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<TextPair> rest;
    std::vector<LabeledPair> held;
    std::vector<std::size_t> where;
    for (std::size_t r = 0; r < labeled.size(); ++r) {
      if ((r / 2) % folds == f) {
        held.push_back(labeled[r]);
        where.push_back(r);
      } else if (labeled[r].label == 1) {
        rest.push_back({labeled[r].ja, labeled[r].zh});
      }
    }
    if (rest.empty()) throw Error("train_filter: a fold left no positives to train on");
    const SideModels sm = fit_side_models(rest, lex, cfg);
    const FeatureModels fm{&sm.t_j2z, &sm.t_z2j, &sm.lm_ja, &sm.lm_zh, &lex};
    const auto part = featurize(held, fm);
    for (std::size_t k = 0; k < part.size(); ++k) rows[where[k]] = part[k];
  }

  SideModels full = fit_side_models(positives, lex, cfg);
  FilterModel model;
  model.t_j2z = std::move(full.t_j2z);
  model.t_z2j = std::move(full.t_z2j);
  model.lm_ja = std::move(full.lm_ja);
  model.lm_zh = std::move(full.lm_zh);
  ForestConfig fc = cfg.forest;
  fc.seed = cfg.seed;
  model.forest = train_forest(rows, fc);
  model.stats = feature_stats(rows);
  model.seed = cfg.seed;
  model.n_positive = positives.size();
  model.n_negative = labeled.size() - positives.size();
  return model;
}

double score_pair(const FilterModel& model, const FeatureVector& fv) { return model.forest.score(fv); }

namespace {

json table_to_json(const TranslationTable& t) {
  json rows = json::array();
  for (const auto& [src, row] : t.rows()) {
    for (const auto& [trg, p] : row) rows.push_back(json::array({src, trg, p}));
  }
  return {{"direction", t.direction == Direction::JaToZh ? "ja-zh" : "zh-ja"}, {"entries", std::move(rows)}};
}

TranslationTable table_from_json(const json& j) {
  TranslationTable t;
  t.direction = j.at("direction").get<std::string>() == "ja-zh" ? Direction::JaToZh : Direction::ZhToJa;
  for (const auto& e : j.at("entries")) t.set(e.at(0).get<std::string>(), e.at(1).get<std::string>(), e.at(2).get<double>());
  return t;
}

json lm_to_json(const CharLM& lm) {
  json ctx = json::array();
  for (const auto& [key, c] : lm.contexts()) {
    json next = json::array();
    for (const auto& [w, n] : c.next) next.push_back(json::array({static_cast<std::uint32_t>(w), n}));
    std::vector<std::uint32_t> k(key.begin(), key.end());
    ctx.push_back({{"h", k}, {"total", c.total}, {"next", std::move(next)}});
  }
  std::vector<std::uint32_t> vocab(lm.vocabulary().begin(), lm.vocabulary().end());
  return {{"order", lm.order()}, {"k", lm.k()}, {"vocab", vocab}, {"contexts", std::move(ctx)}};
}

CharLM lm_from_json(const json& j) {
  std::vector<char32_t> vocab;
  for (const auto& v : j.at("vocab")) vocab.push_back(static_cast<char32_t>(v.get<std::uint32_t>()));
  CharLM::ContextMap ctx;
  for (const auto& c : j.at("contexts")) {
    std::u32string key;
    for (const auto& v : c.at("h")) key.push_back(static_cast<char32_t>(v.get<std::uint32_t>()));
    CharLM::Context entry;
    entry.total = c.at("total").get<std::uint64_t>();
    for (const auto& n : c.at("next")) entry.next[static_cast<char32_t>(n.at(0).get<std::uint32_t>())] = n.at(1).get<std::uint64_t>();
    ctx.emplace(std::move(key), std::move(entry));
  }
  return CharLM::from_counts(j.at("order").get<int>(), j.at("k").get<double>(), std::move(vocab), std::move(ctx));
}

json forest_to_json(const Forest& f) {
  json trees = json::array();
  for (const auto& t : f.trees) {
    json nodes = json::array();
    for (const auto& n : t.nodes) nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.vote}));
    trees.push_back(std::move(nodes));
  }
  return trees;
}

Forest forest_from_json(const json& j) {
  Forest f;
  for (const auto& t : j) {
    DecisionTree tree;
    for (const auto& n : t) {
      TreeNode node{n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(), n.at(4).get<int>()};
      if (node.feature >= static_cast<int>(kNumFeatures)) throw Error("filter model: tree references unknown feature");
      tree.nodes.push_back(node);
    }
    const int count = static_cast<int>(tree.nodes.size());
    for (const auto& node : tree.nodes) {
      if (node.feature >= 0 && (node.left <= 0 || node.left >= count || node.right <= 0 || node.right >= count))
        throw Error("filter model: malformed tree");
    }
    if (tree.nodes.empty()) throw Error("filter model: empty tree");
    f.trees.push_back(std::move(tree));
  }
  return f;
}

}  // namespace

json FilterModel::to_json() const {
  json names = json::array();
  for (auto n : kFeatureNames) names.push_back(std::string(n));
  return {{"format", "localmine-filter"},
          {"version", kVersion},
          {"features", std::move(names)},
          {"seed", seed},
          {"n_positive", n_positive},
          {"n_negative", n_negative},
          {"t_j2z", table_to_json(t_j2z)},
          {"t_z2j", table_to_json(t_z2j)},
          {"lm_ja", lm_to_json(lm_ja)},
          {"lm_zh", lm_to_json(lm_zh)},
          {"stats", {{"mean", stats.mean}, {"stddev", stats.stddev}}},
          {"trees", forest_to_json(forest)}};
}

FilterModel FilterModel::from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "localmine-filter") throw Error("not a filter model");
    if (j.at("version").get<int>() != kVersion) throw Error("unsupported filter model version");
    std::size_t i = 0;
    for (const auto& n : j.at("features")) {
      if (i >= kNumFeatures || n.get<std::string>() != kFeatureNames[i]) throw Error("filter model feature list mismatch");
      ++i;
    }
    if (i != kNumFeatures) throw Error("filter model feature list mismatch");
    FilterModel m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.n_positive = j.at("n_positive").get<std::size_t>();
    m.n_negative = j.at("n_negative").get<std::size_t>();
    m.t_j2z = table_from_json(j.at("t_j2z"));
    m.t_z2j = table_from_json(j.at("t_z2j"));
    m.lm_ja = lm_from_json(j.at("lm_ja"));
    m.lm_zh = lm_from_json(j.at("lm_zh"));
    m.stats.mean = j.at("stats").at("mean").get<std::array<double, kNumFeatures>>();
    m.stats.stddev = j.at("stats").at("stddev").get<std::array<double, kNumFeatures>>();
    m.forest = forest_from_json(j.at("trees"));
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed filter model: ") + e.what());
  }
}

void FilterModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FatalError("cannot write filter model " + path);
  out << to_json().dump() << '\n';
  if (!out) throw FatalError("cannot write filter model " + path);
}

FilterModel FilterModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FatalError("cannot open filter model " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception&) {
    throw FatalError("filter model " + path + " is not valid JSON");
  }
  return from_json(j);
}

std::string FilterModel::digest() const { return sha256_hex(to_json().dump()); }

}  // namespace localmine
