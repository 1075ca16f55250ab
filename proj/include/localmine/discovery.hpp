#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "localmine/fetch.hpp"
#include "localmine/text.hpp"
#include "localmine/url.hpp"

namespace localmine {

struct HostStats {
  std::string host;
  std::uint64_t bytes_ja = 0;
  std::uint64_t bytes_zh = 0;
  std::uint64_t bytes_other = 0;
  std::uint64_t page_count = 0;

  HostStats& operator+=(const HostStats& other);
  bool operator==(const HostStats&) const = default;
};

enum class SiteSource : std::uint8_t { Archive, Crowd };

std::string_view to_string(SiteSource s);  // "ARCHIVE" / "CROWD"
SiteSource parse_site_source(std::string_view s);

struct CandidateSite {
  std::string host;
  std::vector<std::string> seed_urls;
  SiteSource source = SiteSource::Archive;
  double balance = 0.0;
  std::uint64_t bytes_ja = 0;
  std::uint64_t bytes_zh = 0;
};

/// JSONL with keys host, seed_urls, source, balance, bytes_ja, bytes_zh.
std::string to_jsonl(const CandidateSite& site);
CandidateSite candidate_from_json(std::string_view line);
void write_candidates(const std::string& path, const std::vector<CandidateSite>& sites);
std::vector<CandidateSite> read_candidates(const std::string& path);

/// One archive record. Payload is the HTTP body (HTML).
struct ArchiveRecord {
  std::string url;
  std::string payload;
};

struct ArchiveScan {
  std::map<std::string, HostStats> hosts;  // keyed by registrable domain
  std::uint64_t records = 0;
  std::uint64_t skipped = 0;  // undecodable or unusable records

  void merge(const ArchiveScan& other);
};

/// Streaming reducer over archive records: extracted-text bytes per host
/// and detected language.
class ArchiveScanner {
 public:
  explicit ArchiveScanner(const PublicSuffixList& psl = PublicSuffixList::builtin(), DetectorConfig det = {})
      : psl_(&psl), det_(det) {}
  void add(const ArchiveRecord& record);
  const ArchiveScan& result() const { return scan_; }

 private:
  const PublicSuffixList* psl_;
  DetectorConfig det_;
  ArchiveScan scan_;
};

ArchiveScan scan_archive(const std::vector<ArchiveRecord>& records,
                         const PublicSuffixList& psl = PublicSuffixList::builtin());

struct BalanceCriteria {
  std::uint64_t min_bytes = 10000;
  double min_balance = 0.3;
  std::size_t limit = 40000;
};

double balance_of(const HostStats& stats);

/// Hosts passing both thresholds, by bytes_ja+bytes_zh descending then host.
std::vector<CandidateSite> select_balanced_hosts(const std::map<std::string, HostStats>& stats,
                                                 const BalanceCriteria& criteria);

enum class SubmissionError : std::uint8_t { Unreachable, WrongLanguage, DuplicateHost, MalformedUrl, SameUrl };

std::string_view to_string(SubmissionError e);

struct UrlPairSubmission {
  enum class Status : std::uint8_t { Pending, Valid, Error };

  std::string url_ja;
  std::string url_zh;
  std::string worker_id;
  Status status = Status::Pending;
  SubmissionError reason = SubmissionError::Unreachable;  // meaningful when status == Error

  std::string status_string() const;  // "PENDING", "VALID" or "ERROR(<REASON>)"
};

struct UrlPairIntake {
  std::vector<CandidateSite> sites;
  std::vector<UrlPairSubmission> submissions;
};

struct IntakeOptions {
  std::chrono::milliseconds timeout{30000};
  std::size_t parallelism = 4;
  DetectorConfig detector;
  const PublicSuffixList* psl = &PublicSuffixList::builtin();
};

/// Reads `url_ja<TAB>url_zh<TAB>worker_id` rows and validates each pair by
/// fetching both top pages. Unreadable file → FatalError.
UrlPairIntake ingest_url_pairs(const std::string& submissions_path, Fetcher& fetch, const IntakeOptions& opts = {});
UrlPairIntake validate_url_pairs(std::vector<UrlPairSubmission> rows, Fetcher& fetch, const IntakeOptions& opts = {});

/// TSV `url_ja url_zh worker_id status`.
void write_submission_status(const std::string& path, const std::vector<UrlPairSubmission>& rows);

}  // namespace localmine
