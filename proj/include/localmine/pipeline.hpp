#pragma once

#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "localmine/config.hpp"
#include "localmine/corpus.hpp"
#include "localmine/crawler.hpp"
#include "localmine/doc_align.hpp"
#include "localmine/embedding.hpp"
#include "localmine/filter_model.hpp"
#include "localmine/lexicon.hpp"
#include "localmine/sent_align.hpp"

namespace localmine {

/// Word entries plus the optional character map, as configured.
Lexicon load_lexicon(const PipelineConfig& cfg);

/// HTML pages in store order turned into language-tagged, segmented
/// documents; pages that fail to decode or detect as neither language are
/// counted in `skipped`.
struct SiteDocuments {
  std::vector<Document> ja;
  std::vector<Document> zh;
  std::size_t skipped = 0;
};
SiteDocuments build_documents(const PageStore& store, const Lexicon& lex, const DetectorConfig& det);

struct MinedSite {
  SiteDocuments docs;
  std::vector<DocPair> docpairs;
  std::vector<AlignmentLadder> ladders;  // parallel to docpairs
  std::vector<CorpusRecord> raw;         // candidate pairs before filtering
};
MinedSite mine_site(const PageStore& store, const Lexicon& lex, const PipelineConfig& cfg);

/// Rows `#<TAB>ja_url<TAB>zh_url` followed by that document pair's beads.
void write_ladders(const std::string& path, const MinedSite& mined);

using RecordHook = std::function<bool(const CorpusRecord&)>;

struct FilterCounts {
  std::size_t input = 0;
  std::size_t classifier_dropped = 0;
  std::size_t gate_threshold_dropped = 0;
  std::size_t gate_provider_dropped = 0;
  std::size_t hook_dropped = 0;
};

/// Classifier threshold, then the optional embedding gate, then the
/// content hook. Kept records carry their scores.
class RecordFilter {
 public:
  RecordFilter(const FilterModel* model, const Lexicon& lex, double threshold, EmbeddingProvider* provider = nullptr,
               GateConfig gate = {}, RecordHook hook = {});
  std::vector<CorpusRecord> apply(std::vector<CorpusRecord> raw, FilterCounts* counts = nullptr) const;

 private:
  const FilterModel* model_;
  const Lexicon& lex_;
  double threshold_;
  EmbeddingProvider* provider_;
  GateConfig gate_;
  RecordHook hook_;
};

struct SiteOutcome {
  CandidateSite site;
  bool failed = false;
  std::string failure;
  std::size_t pages = 0;
  std::size_t docpairs = 0;
  std::size_t raw_pairs = 0;
  std::vector<CorpusRecord> records;
  bool resumed = false;
};

struct PipelineHooks {
  RecordHook keep_record;  // content-filter hook point; keep when unset
  std::ostream* log = nullptr;
  Fetcher* fetcher = nullptr;                // overrides the configured fetch binding
  EmbeddingProvider* embeddings = nullptr;  // overrides the configured provider
};

struct PipelineResult {
  std::vector<SiteReport> reports;
  std::vector<SiteOutcome> sites;
  std::vector<UrlPairSubmission> submissions;
  std::vector<CorpusRecord> corpus;
  std::uint64_t site_errors = 0;
};

/// Filter model from filter.model when present, otherwise trained from
/// filter.train (and saved under the output directory).
FilterModel obtain_filter_model(const PipelineConfig& cfg, const Lexicon& lex, std::ostream* log = nullptr);

/// Snapshot directories under `root`: root itself when it holds a manifest,
/// otherwise its immediate subdirectories that do, sorted by name.
std::vector<std::string> snapshot_dirs(const std::string& root);

/// Discovery, crawl, mining, filtering and dedup for every configured source.
/// Writes per-site checkpoints, the corpus and the reports under out_dir.
PipelineResult run_pipeline(const PipelineConfig& cfg, const PipelineHooks& hooks = {});

}  // namespace localmine
