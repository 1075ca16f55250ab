#include "localmine/embedding.hpp"

#include <httplib.h>

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "localmine/error.hpp"
#include "localmine/hash.hpp"
#include "localmine/text.hpp"
#include "localmine/url.hpp"

namespace localmine {

VectorFileProvider::VectorFileProvider(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FatalError("cannot open vector file " + path);
  load(in);
}

VectorFileProvider VectorFileProvider::from_string(const std::string& content) {
  VectorFileProvider p;
  std::istringstream in(content);
  p.load(in);
  return p;
}

void VectorFileProvider::load(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error("vector file line " + std::to_string(lineno) + ": missing tab");
    std::istringstream values(line.substr(tab + 1));
    Embedding v;
    float x = 0.0f;
    while (values >> x) v.push_back(x);
    if (!values.eof()) throw Error("vector file line " + std::to_string(lineno) + ": bad number");
    vectors_[line.substr(0, tab)] = std::move(v);
  }
}

std::vector<std::optional<Embedding>> VectorFileProvider::embed(const std::vector<std::string>& sentences) {
  std::vector<std::optional<Embedding>> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    const auto it = vectors_.find(sha256_hex(normalize_text(s)));
    if (it == vectors_.end()) {
      out.emplace_back(std::nullopt);
    } else {
      out.emplace_back(it->second);
    }
  }
  return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string endpoint, std::chrono::milliseconds timeout,
                                             std::size_t batch_size)
    : endpoint_(std::move(endpoint)), timeout_(timeout), batch_size_(batch_size) {
  if (batch_size_ == 0) throw FatalError("embedding batch size must be positive");
  if (!Url::parse(endpoint_)) throw FatalError("bad embedding endpoint: " + endpoint_);
}

std::vector<std::optional<Embedding>> HttpEmbeddingProvider::embed(const std::vector<std::string>& sentences) {
  const Url url = *Url::parse(endpoint_);
  httplib::Client client(url.origin());
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());

  std::vector<std::optional<Embedding>> out(sentences.size());
  for (std::size_t start = 0; start < sentences.size(); start += batch_size_) {
    const std::size_t end = std::min(sentences.size(), start + batch_size_);
    const nlohmann::json body(std::vector<std::string>(sentences.begin() + static_cast<std::ptrdiff_t>(start),
                                                       sentences.begin() + static_cast<std::ptrdiff_t>(end)));
    const auto res = client.Post(url.path_and_query(), body.dump(), "application/json");
    if (!res || res->status != 200) continue;
    try {
      const auto parsed = nlohmann::json::parse(res->body);
      if (!parsed.is_array() || parsed.size() != end - start) continue;
      for (std::size_t i = 0; i < parsed.size(); ++i) out[start + i] = parsed[i].get<Embedding>();
    } catch (const nlohmann::json::exception&) {
      continue;
    }
  }
  return out;
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size() || a.empty()) return 0.0;
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

GateResult embedding_gate(const std::vector<std::pair<std::string, std::string>>& pairs, EmbeddingProvider& provider,
                          const GateConfig& cfg) {
  std::vector<std::string> sentences;
  sentences.reserve(pairs.size() * 2);
  for (const auto& [ja, zh] : pairs) {
    sentences.push_back(ja);
    sentences.push_back(zh);
  }
  std::vector<std::optional<Embedding>> vecs;
  try {
    vecs = provider.embed(sentences);
  } catch (const std::exception&) {
    vecs.assign(sentences.size(), std::nullopt);
  }
  if (vecs.size() != sentences.size()) vecs.assign(sentences.size(), std::nullopt);

  GateResult r;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& a = vecs[2 * i];
    const auto& b = vecs[2 * i + 1];
    if (!a || !b || a->size() != b->size() || a->empty()) {
      ++r.dropped_provider;
      continue;
    }
    const double sim = cosine_similarity(*a, *b);
    const bool keep = cfg.mode == GateMode::Similarity ? sim >= cfg.threshold : 1.0 - sim >= cfg.threshold;
    if (keep) {
      r.kept.push_back(i);
      r.similarity.push_back(sim);
    } else {
      ++r.dropped_threshold;
    }
  }
  return r;
}

}  // namespace localmine
