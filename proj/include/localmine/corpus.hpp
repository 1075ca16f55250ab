#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "localmine/config.hpp"
#include "localmine/discovery.hpp"

namespace localmine {

struct CorpusRecord {
  std::string ja;
  std::string zh;
  std::string src_url_ja;
  std::string src_url_zh;
  double doc_score = 0.0;
  double bead_cost = 0.0;
  double filter_score = 0.0;
  std::optional<double> embed_sim;

  bool operator==(const CorpusRecord&) const = default;
};

/// Scores rounded to 4 decimals; embed_sim null when the gate did not run.
nlohmann::ordered_json to_json(const CorpusRecord& r);
CorpusRecord record_from_json(const nlohmann::json& j);
void write_records_jsonl(const std::string& path, const std::vector<CorpusRecord>& records);
std::vector<CorpusRecord> read_records_jsonl(const std::string& path);
/// `ja<TAB>zh` per line.
void write_records_tsv(const std::string& path, const std::vector<CorpusRecord>& records);

/// Streaming filter keeping the first occurrence of each normalized
/// (ja, zh) pair and dropping records whose sides are equal.
class Deduplicator {
 public:
  explicit Deduplicator(DedupMode mode = DedupMode::Exact) : mode_(mode) {}
  /// True when the record should be kept.
  bool admit(const CorpusRecord& r);

 private:
  DedupMode mode_;
  std::unordered_set<std::string> exact_;
  std::unordered_set<std::uint64_t> hashed_;
};

std::vector<CorpusRecord> dedupe(const std::vector<CorpusRecord>& records, DedupMode mode = DedupMode::Exact);

struct SiteReport {
  SiteSource source = SiteSource::Archive;
  std::uint64_t n_urls = 0;
  std::uint64_t n_errors = 0;
  std::uint64_t n_crawled = 0;
  std::uint64_t n_extracted = 0;
  std::uint64_t n_sentences = 0;

  /// n_extracted / n_crawled rounded to 4 decimals; 0 when nothing was crawled.
  double extraction_rate() const;
  bool operator==(const SiteReport&) const = default;
};

enum class ReportFormat { Tsv, Json, Markdown };
ReportFormat parse_report_format(std::string_view s);

/// "Common Crawl" for archive rows, "Crowdsourcing" for crowd rows.
std::string_view report_label(SiteSource s);

std::string emit_report(const std::vector<SiteReport>& reports, ReportFormat format);
std::vector<SiteReport> reports_from_json(const nlohmann::json& j);

}  // namespace localmine
