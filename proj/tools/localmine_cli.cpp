#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "localmine/config.hpp"
#include "localmine/corpus.hpp"
#include "localmine/crawler.hpp"
#include "localmine/discovery.hpp"
#include "localmine/error.hpp"
#include "localmine/pipeline.hpp"
#include "localmine/warc.hpp"

namespace fs = std::filesystem;
using namespace localmine;

namespace {

struct Globals {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t jobs = 0;
  std::string snapshot_dir;
  bool quiet = false;
};

PipelineConfig resolve_config(const Globals& g) {
  PipelineConfig cfg = g.config.empty() ? PipelineConfig{} : load_config(g.config);
  if (g.seed_set) cfg.seed = g.seed;
  if (g.jobs > 0) cfg.jobs = g.jobs;
  if (!g.snapshot_dir.empty()) cfg.snapshot_dir = g.snapshot_dir;
  return cfg;
}

std::unique_ptr<Fetcher> make_fetcher(const PipelineConfig& cfg) {
  if (!cfg.snapshot_dir.empty()) return make_snapshot_fetcher(snapshot_dirs(cfg.snapshot_dir));
  return std::make_unique<HttpFetcher>(cfg.user_agent);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FatalError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int discover_archive(const Globals& g, const std::string& archive, const std::string& out) {
  const PipelineConfig cfg = resolve_config(g);
  if (!fs::exists(archive)) throw FatalError("archive not found: " + archive);
  ArchiveScanner scanner(PublicSuffixList::builtin(), cfg.detector);
  const auto unreadable = for_each_archive_record(archive, [&](const ArchiveRecord& r) { scanner.add(r); });
  const auto sites = select_balanced_hosts(scanner.result().hosts, cfg.balance);
  write_candidates(out, sites);
  std::cerr << scanner.result().records << " records, " << scanner.result().skipped + unreadable << " skipped, "
            << sites.size() << " sites\n";
  return 0;
}

int validate_urls(const Globals& g, const std::string& submissions, const std::string& out_dir) {
  const PipelineConfig cfg = resolve_config(g);
  auto fetcher = make_fetcher(cfg);
  IntakeOptions io;
  io.timeout = cfg.fetch_timeout;
  io.parallelism = cfg.fetch_parallelism;
  io.detector = cfg.detector;
  const UrlPairIntake intake = ingest_url_pairs(submissions, *fetcher, io);
  fs::create_directories(out_dir);
  write_candidates((fs::path(out_dir) / "candidates.jsonl").string(), intake.sites);
  write_submission_status((fs::path(out_dir) / "submissions_status.tsv").string(), intake.submissions);
  std::size_t errors = 0;
  for (const auto& s : intake.submissions) errors += s.status == UrlPairSubmission::Status::Error ? 1 : 0;
  std::cerr << intake.submissions.size() << " rows, " << intake.sites.size() << " valid sites, " << errors
            << " errors\n";
  return errors > 0 ? 2 : 0;
}

int crawl(const Globals& g, const std::string& candidates, const std::string& out_dir) {
  const PipelineConfig cfg = resolve_config(g);
  cfg.budget.validate();
  auto fetcher = make_fetcher(cfg);
  const bool snapshot = !cfg.snapshot_dir.empty();
  HostThrottle throttle;
  int failures = 0;
  for (const auto& site : read_candidates(candidates)) {
    ManualClock manual;
    SystemClock system;
    Clock& clock = snapshot ? static_cast<Clock&>(manual) : static_cast<Clock&>(system);
    CrawlOptions opts;
    opts.user_agent = cfg.user_agent;
    opts.fetch_timeout = cfg.fetch_timeout;
    opts.throttle = snapshot ? nullptr : &throttle;
    const CrawlResult r = crawl_site(site, cfg.budget, *fetcher, clock, opts);
    const fs::path dir = fs::path(out_dir) / site.host / "pages";
    fs::remove_all(dir);
    write_snapshot(r.store, dir.string());
    std::cerr << site.host << ": " << r.store.pages.size() << " pages" << (r.failed ? " (failed: " + r.failure + ")" : "")
              << '\n';
    failures += r.failed ? 1 : 0;
  }
  return failures > 0 ? 2 : 0;
}

int mine(const Globals& g, const std::string& pages, const std::string& out_dir) {
  PipelineConfig cfg = resolve_config(g);
  cfg.filter_enabled = false;
  cfg.validate();
  const Lexicon lex = load_lexicon(cfg);
  const PageStore store = load_snapshot(pages);
  const MinedSite mined = mine_site(store, lex, cfg);
  fs::create_directories(out_dir);
  write_docpair_audit((fs::path(out_dir) / "docpairs.jsonl").string(), mined.docpairs, mined.docs.ja, mined.docs.zh);
  write_ladders((fs::path(out_dir) / "ladder.tsv").string(), mined);
  write_records_jsonl((fs::path(out_dir) / "raw_pairs.jsonl").string(), mined.raw);
  std::cerr << mined.docpairs.size() << " document pairs, " << mined.raw.size() << " sentence pairs\n";
  return 0;
}

int train_filter_cmd(const Globals& g, const std::string& train, const std::string& out) {
  PipelineConfig cfg = resolve_config(g);
  cfg.filter_enabled = true;
  cfg.filter_model.clear();
  cfg.filter_train = train;
  cfg.validate();
  const Lexicon lex = load_lexicon(cfg);
  std::vector<TextPair> positives;
  for (auto& e : read_pair_tsv(train)) positives.push_back({std::move(e.ja), std::move(e.zh)});
  FilterTrainConfig tc = cfg.filter_train_cfg;
  tc.seed = cfg.seed;
  const FilterModel model = train_filter(positives, lex, tc);
  model.save(out);
  std::cerr << "trained on " << model.n_positive << " positives and " << model.n_negative << " negatives\n";
  return 0;
}

int filter_cmd(const Globals& g, const std::string& model_path, const std::string& in, const std::string& out) {
  PipelineConfig cfg = resolve_config(g);
  if (!model_path.empty()) cfg.filter_model = model_path;
  cfg.filter_enabled = true;
  cfg.validate();
  const Lexicon lex = load_lexicon(cfg);
  const FilterModel model = FilterModel::load(cfg.filter_model);
  std::unique_ptr<EmbeddingProvider> provider;
  if (cfg.embedding_enabled) {
    if (!cfg.embedding_vectors.empty()) {
      provider = std::make_unique<VectorFileProvider>(cfg.embedding_vectors);
    } else {
      provider = std::make_unique<HttpEmbeddingProvider>(cfg.embedding_endpoint, cfg.embedding_timeout, cfg.embedding_batch);
    }
  }
  const RecordFilter filter(&model, lex, cfg.filter_threshold, provider.get(), cfg.gate);
  FilterCounts counts;
  const auto kept = filter.apply(read_records_jsonl(in), &counts);
  write_records_jsonl(out, kept);
  std::cerr << counts.input << " in, " << kept.size() << " kept (classifier " << counts.classifier_dropped
            << ", gate " << counts.gate_threshold_dropped << ", provider " << counts.gate_provider_dropped << ")\n";
  return 0;
}

int dedup_cmd(const Globals& g, const std::vector<std::string>& inputs, const std::string& out, const std::string& tsv) {
  const PipelineConfig cfg = resolve_config(g);
  Deduplicator d(cfg.dedup);
  std::vector<CorpusRecord> kept;
  std::size_t total = 0;
  for (const auto& path : inputs) {
    for (auto& r : read_records_jsonl(path)) {
      ++total;
      if (d.admit(r)) kept.push_back(std::move(r));
    }
  }
  write_records_jsonl(out, kept);
  if (!tsv.empty()) write_records_tsv(tsv, kept);
  std::cerr << total << " in, " << kept.size() << " out\n";
  return 0;
}

int report_cmd(const std::string& in, const std::string& format) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(in));
  } catch (const nlohmann::json::exception&) {
    throw FatalError(in + " is not valid JSON");
  }
  std::cout << emit_report(reports_from_json(j), parse_report_format(format));
  return 0;
}

int run_cmd(const Globals& g, const std::string& out_dir) {
  if (g.config.empty()) throw FatalError("run needs --config");
  PipelineConfig cfg = resolve_config(g);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  PipelineHooks hooks;
  if (!g.quiet) hooks.log = &std::cerr;
  const PipelineResult r = run_pipeline(cfg, hooks);
  std::cout << emit_report(r.reports, ReportFormat::Tsv);
  return r.site_errors > 0 ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Japanese-Chinese parallel corpus mining"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Pipeline configuration file");
  app.add_option_function<std::uint64_t>(
      "--seed", [&g](const std::uint64_t& s) { g.seed = s; g.seed_set = true; }, "Random seed");
  app.add_option("--jobs", g.jobs, "Parallel site workers");
  app.add_option("--snapshot-dir", g.snapshot_dir, "Serve fetches from snapshot directories");
  app.add_flag("-q,--quiet", g.quiet, "No progress output");

  std::string archive, out, submissions, out_dir, candidates, pages, train, model, in, tsv, format = "tsv";
  std::vector<std::string> inputs;

  auto* discover = app.add_subcommand("discover-archive", "Find balanced JA/ZH hosts in a WARC archive");
  discover->add_option("--archive", archive)->required();
  discover->add_option("--out", out)->required();

  auto* validate = app.add_subcommand("validate-urls", "Validate crowdsourced top-page URL pairs");
  validate->add_option("--submissions", submissions)->required();
  validate->add_option("--out-dir", out_dir)->required();

  auto* crawl_sub = app.add_subcommand("crawl", "Crawl candidate sites into page snapshots");
  crawl_sub->add_option("--candidates", candidates)->required();
  crawl_sub->add_option("--out-dir", out_dir)->required();

  auto* mine_sub = app.add_subcommand("mine", "Align documents and sentences of one crawled site");
  mine_sub->add_option("--pages", pages)->required();
  mine_sub->add_option("--out-dir", out_dir)->required();

  auto* train_sub = app.add_subcommand("train-filter", "Train the sentence-pair classifier");
  train_sub->add_option("--train", train, "Parallel TSV ja<TAB>zh")->required();
  train_sub->add_option("--out", out)->required();

  auto* filter_sub = app.add_subcommand("filter", "Score and filter candidate pairs");
  filter_sub->add_option("--model", model);
  filter_sub->add_option("--in", in)->required();
  filter_sub->add_option("--out", out)->required();

  auto* dedup_sub = app.add_subcommand("dedup", "Remove duplicate pairs");
  dedup_sub->add_option("--in", inputs)->required();
  dedup_sub->add_option("--out", out)->required();
  dedup_sub->add_option("--tsv", tsv);

  auto* report_sub = app.add_subcommand("report", "Render a report JSON file");
  report_sub->add_option("--in", in)->required();
  report_sub->add_option("--format", format)->check(CLI::IsMember({"tsv", "json", "markdown"}));

  auto* run_sub = app.add_subcommand("run", "Run the whole pipeline");
  run_sub->add_option("--out-dir", out_dir, "Overrides pipeline.out_dir");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*discover) return discover_archive(g, archive, out);
    if (*validate) return validate_urls(g, submissions, out_dir);
    if (*crawl_sub) return crawl(g, candidates, out_dir);
    if (*mine_sub) return mine(g, pages, out_dir);
    if (*train_sub) return train_filter_cmd(g, train, out);
    if (*filter_sub) return filter_cmd(g, model, in, out);
    if (*dedup_sub) return dedup_cmd(g, inputs, out, tsv);
    if (*report_sub) return report_cmd(in, format);
    if (*run_sub) return run_cmd(g, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
