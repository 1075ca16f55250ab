#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "localmine/discovery.hpp"
#include "localmine/fetch.hpp"
#include "localmine/url.hpp"

namespace localmine {

struct CrawlBudget {
  std::int64_t max_seconds = 172800;  // 48 hours
  std::int64_t max_pages = 50000;
  std::int64_t max_bytes = std::int64_t{2} << 30;
  std::int64_t per_host_delay_ms = 1000;

  /// Throws FatalError unless every limit is positive.
  void validate() const;
};

struct StoredPage {
  std::string url;
  std::string content_type;
  std::string body;
  std::int64_t fetch_time_ms = 0;
};

struct PageStore {
  std::string host;
  std::vector<StoredPage> pages;

  std::uint64_t total_bytes() const;
};

enum class ContentKind : std::uint8_t { Html, Pdf, Word, Other };
ContentKind classify_content(std::string_view content_type, std::string_view body);

/// Serializes requests per host across concurrent crawls.
class HostThrottle {
 public:
  /// Blocks (on `clock`) until `delay_ms` has passed since the previous
  /// request to `host`, then records the new request time.
  void wait_turn(const std::string& host, std::int64_t delay_ms, Clock& clock);

 private:
  std::mutex mu_;
  std::map<std::string, std::int64_t> next_slot_;
};

struct CrawlOptions {
  std::string user_agent = "localmine";
  std::chrono::milliseconds fetch_timeout{30000};
  const PublicSuffixList* psl = &PublicSuffixList::builtin();
  HostThrottle* throttle = nullptr;  // shared across sites when set
};

struct CrawlStats {
  std::uint64_t fetched = 0;
  std::uint64_t fetch_errors = 0;
  std::uint64_t robots_blocked = 0;
  std::uint64_t robots_fetches = 0;
  std::uint64_t skipped_content = 0;
  std::uint64_t binary_documents = 0;
  std::uint64_t off_domain_links = 0;
};

struct CrawlResult {
  PageStore store;
  bool failed = false;
  std::string failure;  // "unreachable" or "robots" when failed
  CrawlStats stats;
};

/// Polite breadth-first crawl confined to the seeds' registrable domains.
CrawlResult crawl_site(const CandidateSite& site, const CrawlBudget& budget, Fetcher& fetch, Clock& clock,
                       const CrawlOptions& opts = {});

struct SnapshotEntry {
  std::string file;
  std::string url;
  std::string content_type;
  int status = 200;
};

/// Reads `<dir>/manifest.jsonl`. Missing manifest → FatalError.
std::vector<SnapshotEntry> read_snapshot_manifest(const std::string& dir);

/// Pages listed in a snapshot directory, in manifest order (robots.txt
/// entries excluded).
PageStore load_snapshot(const std::string& dir);

/// A fetcher answering from one or more snapshot directories.
std::unique_ptr<InMemoryFetcher> make_snapshot_fetcher(const std::vector<std::string>& dirs);

/// Writes bodies plus manifest.jsonl so the directory loads back with load_snapshot.
void write_snapshot(const PageStore& store, const std::string& dir);

/// Plug-in point for PDF/Word text extraction.
class BinaryTextExtractor {
 public:
  virtual ~BinaryTextExtractor() = default;
  virtual bool handles(ContentKind kind) const = 0;
  virtual std::string extract(std::string_view body) const = 0;
};

}  // namespace localmine
