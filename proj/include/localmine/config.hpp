#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>

#include "localmine/crawler.hpp"
#include "localmine/discovery.hpp"
#include "localmine/doc_align.hpp"
#include "localmine/embedding.hpp"
#include "localmine/filter_model.hpp"
#include "localmine/sent_align.hpp"
#include "localmine/text.hpp"

namespace localmine {

enum class DedupMode { Exact, Approximate };

struct PipelineConfig {
  // [pipeline]
  std::string out_dir = "out";
  std::size_t jobs = 1;
  std::uint64_t seed = 1;
  bool resume = true;
  std::string snapshot_dir;  // replaces network fetches when set

  // [inputs]
  std::string archive;      // WARC file or directory
  std::string candidates;   // candidate-site JSONL
  std::string submissions;  // crowd URL-pair TSV
  std::string lexicon;
  std::string char_map;

  DetectorConfig detector;
  BalanceCriteria balance;
  std::size_t fetch_parallelism = 4;
  std::chrono::milliseconds fetch_timeout{30000};
  std::string user_agent = "localmine/1.0";

  CrawlBudget budget;
  DocAlignConfig doc_align;
  AlignConfig sent_align;
  double max_bead_cost = 8.0;

  // [filter]
  bool filter_enabled = true;
  std::string filter_model;  // load from here when it exists
  std::string filter_train;  // otherwise train from this TSV
  double filter_threshold = 0.5;
  FilterTrainConfig filter_train_cfg;

  // [embedding]
  bool embedding_enabled = false;
  std::string embedding_vectors;
  std::string embedding_endpoint;
  GateConfig gate;
  std::chrono::milliseconds embedding_timeout{30000};
  std::size_t embedding_batch = 32;

  DedupMode dedup = DedupMode::Exact;

  /// Throws FatalError on any out-of-range value or inconsistent combination.
  void validate() const;
};

/// INI-style `[section]` / `key = value` file. Relative paths resolve
/// against the file's directory. Unknown keys are fatal.
PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const std::string& text, const std::string& base_dir = ".");

/// Every key with its current value, in file order.
std::string dump_config(const PipelineConfig& cfg);

}  // namespace localmine
