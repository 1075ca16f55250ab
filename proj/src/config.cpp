#include "localmine/config.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "localmine/error.hpp"

namespace localmine {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw FatalError("config " + key + ": not a number: " + v);
  return x;
}

std::int64_t to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw FatalError("config " + key + ": not an integer: " + v);
  return x;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  const auto x = to_int(key, v);
  if (x < 0) throw FatalError("config " + key + ": must be non-negative");
  return static_cast<std::size_t>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw FatalError("config " + key + ": not a boolean: " + v);
}

std::string fmt(double x) {
  std::ostringstream o;
  o.precision(17);
  o << x;
  return o.str();
}

std::string fmt(bool b) { return b ? "true" : "false"; }

using Setter = std::function<void(PipelineConfig&, const std::string& key, const std::string& value)>;
using Getter = std::function<std::string(const PipelineConfig&)>;

struct Key {
  std::string section;
  std::string name;
  Setter set;
  Getter get;
  bool is_path = false;
};

template <typename T>
Key path_key(std::string section, std::string name, T PipelineConfig::*field) {
  return {std::move(section), std::move(name),
          [field](PipelineConfig& c, const std::string&, const std::string& v) { c.*field = v; },
          [field](const PipelineConfig& c) { return c.*field; }, true};
}

#define LM_KEY(SEC, NAME, SET, GET) \
  Key { SEC, NAME, [](PipelineConfig& c, const std::string& k, const std::string& v) { (void)k; SET; }, [](const PipelineConfig& c) { return GET; }, false }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(path_key("pipeline", "out_dir", &PipelineConfig::out_dir));
    k.push_back(LM_KEY("pipeline", "jobs", c.jobs = to_size(k, v), std::to_string(c.jobs)));
    k.push_back(LM_KEY("pipeline", "seed", c.seed = static_cast<std::uint64_t>(to_int(k, v)), std::to_string(c.seed)));
    k.push_back(LM_KEY("pipeline", "resume", c.resume = to_bool(k, v), fmt(c.resume)));
    k.push_back(path_key("pipeline", "snapshot_dir", &PipelineConfig::snapshot_dir));

    k.push_back(path_key("inputs", "archive", &PipelineConfig::archive));
    k.push_back(path_key("inputs", "candidates", &PipelineConfig::candidates));
    k.push_back(path_key("inputs", "submissions", &PipelineConfig::submissions));
    k.push_back(path_key("inputs", "lexicon", &PipelineConfig::lexicon));
    k.push_back(path_key("inputs", "char_map", &PipelineConfig::char_map));

    k.push_back(LM_KEY("detector", "kana_min", c.detector.kana_min = to_double(k, v), fmt(c.detector.kana_min)));
    k.push_back(LM_KEY("detector", "han_min", c.detector.han_min = to_double(k, v), fmt(c.detector.han_min)));

    k.push_back(LM_KEY("discovery", "min_bytes", c.balance.min_bytes = to_size(k, v), std::to_string(c.balance.min_bytes)));
    k.push_back(LM_KEY("discovery", "min_balance", c.balance.min_balance = to_double(k, v), fmt(c.balance.min_balance)));
    k.push_back(LM_KEY("discovery", "limit", c.balance.limit = to_size(k, v), std::to_string(c.balance.limit)));
    k.push_back(LM_KEY("discovery", "fetch_parallelism", c.fetch_parallelism = to_size(k, v), std::to_string(c.fetch_parallelism)));
    k.push_back(LM_KEY("discovery", "fetch_timeout_ms", c.fetch_timeout = std::chrono::milliseconds(to_int(k, v)),
                       std::to_string(c.fetch_timeout.count())));

    k.push_back(LM_KEY("crawler", "max_seconds", c.budget.max_seconds = to_int(k, v), std::to_string(c.budget.max_seconds)));
    k.push_back(LM_KEY("crawler", "max_pages", c.budget.max_pages = to_int(k, v), std::to_string(c.budget.max_pages)));
    k.push_back(LM_KEY("crawler", "max_bytes", c.budget.max_bytes = to_int(k, v), std::to_string(c.budget.max_bytes)));
    k.push_back(LM_KEY("crawler", "per_host_delay_ms", c.budget.per_host_delay_ms = to_int(k, v),
                       std::to_string(c.budget.per_host_delay_ms)));
    k.push_back(LM_KEY("crawler", "user_agent", c.user_agent = v, c.user_agent));

    k.push_back(LM_KEY("doc_align", "w_dict", c.doc_align.weights.dict = to_double(k, v), fmt(c.doc_align.weights.dict)));
    k.push_back(LM_KEY("doc_align", "w_url", c.doc_align.weights.url = to_double(k, v), fmt(c.doc_align.weights.url)));
    k.push_back(LM_KEY("doc_align", "w_struct", c.doc_align.weights.structure = to_double(k, v),
                       fmt(c.doc_align.weights.structure)));
    k.push_back(LM_KEY("doc_align", "w_len", c.doc_align.weights.length = to_double(k, v), fmt(c.doc_align.weights.length)));
    k.push_back(LM_KEY("doc_align", "min_score", c.doc_align.min_score = to_double(k, v), fmt(c.doc_align.min_score)));
    k.push_back(LM_KEY("doc_align", "prefilter_url", c.doc_align.prefilter_url = to_double(k, v),
                       fmt(c.doc_align.prefilter_url)));
    k.push_back(LM_KEY("doc_align", "prefilter_dict", c.doc_align.prefilter_dict = to_double(k, v),
                       fmt(c.doc_align.prefilter_dict)));

    k.push_back(LM_KEY("sent_align", "c", c.sent_align.model.c = to_double(k, v), fmt(c.sent_align.model.c)));
    k.push_back(LM_KEY("sent_align", "s2", c.sent_align.model.s2 = to_double(k, v), fmt(c.sent_align.model.s2)));
    for (BeadKind kind : kAllBeadKinds) {
      std::string name = "prior_" + std::string(to_string(kind));
      name[name.find('-')] = '_';
      const auto idx = static_cast<std::size_t>(kind);
      k.push_back({"sent_align", name,
                   [idx](PipelineConfig& c, const std::string& key, const std::string& v) {
                     c.sent_align.model.priors[idx] = to_double(key, v);
                   },
                   [idx](const PipelineConfig& c) { return fmt(c.sent_align.model.priors[idx]); }, false});
    }
    k.push_back(LM_KEY("sent_align", "lambda", c.sent_align.lambda = to_double(k, v), fmt(c.sent_align.lambda)));
    k.push_back(LM_KEY("sent_align", "band", c.sent_align.band = to_bool(k, v), fmt(c.sent_align.band)));
    k.push_back(LM_KEY("sent_align", "band_min", c.sent_align.band_min = to_double(k, v), fmt(c.sent_align.band_min)));
    k.push_back(LM_KEY("sent_align", "band_frac", c.sent_align.band_frac = to_double(k, v), fmt(c.sent_align.band_frac)));
    k.push_back(LM_KEY("sent_align", "reestimate", c.sent_align.reestimate = to_bool(k, v), fmt(c.sent_align.reestimate)));
    k.push_back(LM_KEY("sent_align", "max_bead_cost", c.max_bead_cost = to_double(k, v), fmt(c.max_bead_cost)));

    k.push_back(LM_KEY("filter", "enabled", c.filter_enabled = to_bool(k, v), fmt(c.filter_enabled)));
    k.push_back(path_key("filter", "model", &PipelineConfig::filter_model));
    k.push_back(path_key("filter", "train", &PipelineConfig::filter_train));
    k.push_back(LM_KEY("filter", "threshold", c.filter_threshold = to_double(k, v), fmt(c.filter_threshold)));
    k.push_back(LM_KEY("filter", "trees", c.filter_train_cfg.forest.trees = static_cast<int>(to_int(k, v)),
                       std::to_string(c.filter_train_cfg.forest.trees)));
    k.push_back(LM_KEY("filter", "depth", c.filter_train_cfg.forest.max_depth = static_cast<int>(to_int(k, v)),
                       std::to_string(c.filter_train_cfg.forest.max_depth)));
    k.push_back(LM_KEY("filter", "features_per_split",
                       c.filter_train_cfg.forest.features_per_split = static_cast<int>(to_int(k, v)),
                       std::to_string(c.filter_train_cfg.forest.features_per_split)));
    k.push_back(LM_KEY("filter", "model1_iterations", c.filter_train_cfg.model1_iterations = static_cast<int>(to_int(k, v)),
                       std::to_string(c.filter_train_cfg.model1_iterations)));
    k.push_back(LM_KEY("filter", "lm_order", c.filter_train_cfg.lm_order = static_cast<int>(to_int(k, v)),
                       std::to_string(c.filter_train_cfg.lm_order)));
    k.push_back(LM_KEY("filter", "folds", c.filter_train_cfg.folds = static_cast<int>(to_int(k, v)),
                       std::to_string(c.filter_train_cfg.folds)));
    k.push_back(LM_KEY("filter", "lm_k", c.filter_train_cfg.lm_k = to_double(k, v), fmt(c.filter_train_cfg.lm_k)));

    k.push_back(LM_KEY("embedding", "enabled", c.embedding_enabled = to_bool(k, v), fmt(c.embedding_enabled)));
    k.push_back(path_key("embedding", "vectors", &PipelineConfig::embedding_vectors));
    k.push_back(LM_KEY("embedding", "endpoint", c.embedding_endpoint = v, c.embedding_endpoint));
    k.push_back(LM_KEY("embedding", "threshold", c.gate.threshold = to_double(k, v), fmt(c.gate.threshold)));
    k.push_back(LM_KEY(
        "embedding", "mode",
        if (v == "similarity") c.gate.mode = GateMode::Similarity;
        else if (v == "distance") c.gate.mode = GateMode::Distance;
        else throw FatalError("config " + k + ": expected similarity or distance"),
        std::string(c.gate.mode == GateMode::Similarity ? "similarity" : "distance")));
    k.push_back(LM_KEY("embedding", "timeout_ms", c.embedding_timeout = std::chrono::milliseconds(to_int(k, v)),
                       std::to_string(c.embedding_timeout.count())));
    k.push_back(LM_KEY("embedding", "batch_size", c.embedding_batch = to_size(k, v), std::to_string(c.embedding_batch)));

    k.push_back(LM_KEY(
        "dedup", "mode",
        if (v == "exact") c.dedup = DedupMode::Exact;
        else if (v == "approximate") c.dedup = DedupMode::Approximate;
        else throw FatalError("config " + k + ": expected exact or approximate"),
        std::string(c.dedup == DedupMode::Exact ? "exact" : "approximate")));
    return k;
  }();
  return table;
}

#undef LM_KEY

}  // namespace

void PipelineConfig::validate() const {
  if (out_dir.empty()) throw FatalError("config pipeline.out_dir must be set");
  if (jobs < 1) throw FatalError("config pipeline.jobs must be at least 1");
  if (detector.kana_min < 0.0 || detector.kana_min > 1.0 || detector.han_min < 0.0 || detector.han_min > 1.0)
    throw FatalError("config detector thresholds must be in [0, 1]");
  if (!(balance.min_balance > 0.0 && balance.min_balance <= 1.0))
    throw FatalError("config discovery.min_balance must be in (0, 1]");
  if (balance.limit < 1) throw FatalError("config discovery.limit must be at least 1");
  if (fetch_parallelism < 1) throw FatalError("config discovery.fetch_parallelism must be at least 1");
  if (fetch_timeout.count() <= 0) throw FatalError("config discovery.fetch_timeout_ms must be positive");
  budget.validate();
  doc_align.weights.validate();
  if (doc_align.min_score < 0.0 || doc_align.min_score > 1.0) throw FatalError("config doc_align.min_score must be in [0, 1]");
  sent_align.model.validate();
  if (sent_align.lambda < 0.0) throw FatalError("config sent_align.lambda must be non-negative");
  if (sent_align.band_min < 0.0 || sent_align.band_frac < 0.0) throw FatalError("config sent_align band must be non-negative");
  if (filter_enabled && filter_model.empty() && filter_train.empty())
    throw FatalError("config filter: set filter.model or filter.train, or disable the filter");
  if (filter_threshold < 0.0 || filter_threshold > 1.0) throw FatalError("config filter.threshold must be in [0, 1]");
  filter_train_cfg.forest.validate();
  if (filter_train_cfg.model1_iterations < 1) throw FatalError("config filter.model1_iterations must be at least 1");
  if (filter_train_cfg.lm_order < 2 || filter_train_cfg.lm_order > 7) throw FatalError("config filter.lm_order must be in [2, 7]");
  if (filter_train_cfg.folds < 2) throw FatalError("config filter.folds must be at least 2");
  if (!(filter_train_cfg.lm_k > 0.0)) throw FatalError("config filter.lm_k must be positive");
  if (embedding_enabled && embedding_vectors.empty() == embedding_endpoint.empty())
    throw FatalError("config embedding: set exactly one of embedding.vectors and embedding.endpoint");
  if (gate.threshold < -1.0 || gate.threshold > 2.0) throw FatalError("config embedding.threshold out of range");
  if (embedding_batch < 1) throw FatalError("config embedding.batch_size must be positive");
  if (lexicon.empty()) throw FatalError("config inputs.lexicon must be set");
}

PipelineConfig parse_config(const std::string& text, const std::string& base_dir) {
  PipelineConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  bool priors_set = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw FatalError("config line " + std::to_string(lineno) + ": bad section header");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw FatalError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string name = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    const Key* key = nullptr;
    for (const auto& k : keys()) {
      if (k.section == section && k.name == name) key = &k;
    }
    if (!key) throw FatalError("config line " + std::to_string(lineno) + ": unknown key " + section + "." + name);
    if (key->is_path && !value.empty() && fs::path(value).is_relative()) value = (fs::path(base_dir) / value).lexically_normal().string();
    key->set(cfg, section + "." + name, value);
    if (name.rfind("prior_", 0) == 0) priors_set = true;
  }
  if (priors_set) {
    double total = 0.0;
    for (double p : cfg.sent_align.model.priors) total += p;
    if (!(total > 0.0)) throw FatalError("config sent_align priors must be positive");
    for (double& p : cfg.sent_align.model.priors) p /= total;
  }
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FatalError("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const fs::path dir = fs::path(path).parent_path();
  return parse_config(buf.str(), dir.empty() ? "." : dir.string());
}

std::string dump_config(const PipelineConfig& cfg) {
  std::ostringstream out;
  std::string section;
  for (const auto& k : keys()) {
    if (k.section != section) {
      if (!section.empty()) out << '\n';
      section = k.section;
      out << '[' << section << "]\n";
    }
    out << k.name << " = " << k.get(cfg) << '\n';
  }
  return out.str();
}

}  // namespace localmine
