#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace localmine {

using Embedding = std::vector<float>;

/// Sentence-vector capability. A missing vector marks a provider failure
/// for that sentence.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<std::optional<Embedding>> embed(const std::vector<std::string>& sentences) = 0;
};

/// Precomputed vectors, one per line: `sha256(normalized text)<TAB>v1 v2 ...`.
class VectorFileProvider : public EmbeddingProvider {
 public:
  explicit VectorFileProvider(const std::string& path);
  static VectorFileProvider from_string(const std::string& content);

  std::vector<std::optional<Embedding>> embed(const std::vector<std::string>& sentences) override;
  std::size_t size() const { return vectors_.size(); }

 private:
  VectorFileProvider() = default;
  void load(std::istream& in);

  std::unordered_map<std::string, Embedding> vectors_;
};

/// POSTs a JSON array of sentences; expects a JSON array of float arrays.
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string endpoint, std::chrono::milliseconds timeout, std::size_t batch_size);
  std::vector<std::optional<Embedding>> embed(const std::vector<std::string>& sentences) override;

 private:
  std::string endpoint_;
  std::chrono::milliseconds timeout_;
  std::size_t batch_size_;
};

/// 0 when either vector is zero or the dimensions differ.
double cosine_similarity(const Embedding& a, const Embedding& b);

enum class GateMode { Similarity, Distance };

struct GateConfig {
  double threshold = 0.7;
  /// Similarity keeps cos >= threshold; Distance keeps 1 - cos >= threshold.
  GateMode mode = GateMode::Similarity;
};

struct GateResult {
  std::vector<std::size_t> kept;  // input indices, ascending
  std::vector<double> similarity;  // parallel to kept
  std::size_t dropped_threshold = 0;
  std::size_t dropped_provider = 0;
};

GateResult embedding_gate(const std::vector<std::pair<std::string, std::string>>& pairs, EmbeddingProvider& provider,
                          const GateConfig& cfg = {});

}  // namespace localmine
