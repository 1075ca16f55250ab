#include "localmine/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "localmine/error.hpp"
#include "localmine/html.hpp"
#include "localmine/utf8.hpp"
#include "localmine/warc.hpp"

namespace localmine {

namespace fs = std::filesystem;

Lexicon load_lexicon(const PipelineConfig& cfg) {
  if (!fs::exists(cfg.lexicon)) throw FatalError("lexicon not found: " + cfg.lexicon);
  const auto entries = read_pair_tsv(cfg.lexicon);
  std::vector<LexiconEntry> char_map;
  if (!cfg.char_map.empty()) {
    if (!fs::exists(cfg.char_map)) throw FatalError("character map not found: " + cfg.char_map);
    char_map = read_pair_tsv(cfg.char_map);
  }
  return augment_with_char_map(entries, char_map);
}

SiteDocuments build_documents(const PageStore& store, const Lexicon& lex, const DetectorConfig& det) {
  SiteDocuments out;
  for (const auto& page : store.pages) {
    if (classify_content(page.content_type, page.body) != ContentKind::Html) continue;
    ExtractedText text;
    try {
      text = extract_text(page.body);
    } catch (const Error&) {
      ++out.skipped;
      continue;
    }
    if (text.text.empty()) {
      ++out.skipped;
      continue;
    }
    const Language lang = detect_language(text.text, det).lang;
    if (lang == Language::Other) {
      ++out.skipped;
      continue;
    }
    Document doc;
    doc.url = page.url;
    doc.lang = lang;
    doc.tag_digest = std::move(text.tag_digest);
    doc.raw_char_count = utf8::length(text.text);
    doc.sentences = split_sentences(text.text, lang);
    for (auto& s : doc.sentences) s.tokens = segment_words(s.text, lang, lex);
    (lang == Language::Ja ? out.ja : out.zh).push_back(std::move(doc));
  }
  return out;
}

MinedSite mine_site(const PageStore& store, const Lexicon& lex, const PipelineConfig& cfg) {
  MinedSite m;
  m.docs = build_documents(store, lex, cfg.detector);
  m.docpairs = match_documents(m.docs.ja, m.docs.zh, lex, cfg.doc_align);
  AlignConfig ac = cfg.sent_align;
  ac.dir = Direction::JaToZh;
  for (const auto& dp : m.docpairs) {
    const Document& ja = m.docs.ja[dp.ja_index];
    const Document& zh = m.docs.zh[dp.zh_index];
    AlignmentLadder ladder = align_sentences(ja.sentences, zh.sentences, lex, ac);
    for (auto& p : extract_pairs(ladder, ja.sentences, zh.sentences, cfg.max_bead_cost)) {
      CorpusRecord r;
      r.ja = std::move(p.src);
      r.zh = std::move(p.trg);
      r.src_url_ja = ja.url;
      r.src_url_zh = zh.url;
      r.doc_score = dp.score;
      r.bead_cost = p.cost;
      m.raw.push_back(std::move(r));
    }
    m.ladders.push_back(std::move(ladder));
  }
  return m;
}

void write_ladders(const std::string& path, const MinedSite& mined) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FatalError("cannot write " + path);
  for (std::size_t i = 0; i < mined.docpairs.size(); ++i) {
    const auto& dp = mined.docpairs[i];
    out << "#\t" << mined.docs.ja[dp.ja_index].url << '\t' << mined.docs.zh[dp.zh_index].url << '\n';
    write_ladder_tsv(out, mined.ladders[i]);
  }
}

RecordFilter::RecordFilter(const FilterModel* model, const Lexicon& lex, double threshold, EmbeddingProvider* provider,
                           GateConfig gate, RecordHook hook)
    : model_(model), lex_(lex), threshold_(threshold), provider_(provider), gate_(gate), hook_(std::move(hook)) {}

std::vector<CorpusRecord> RecordFilter::apply(std::vector<CorpusRecord> raw, FilterCounts* counts) const {
  FilterCounts local;
  local.input = raw.size();
  std::vector<CorpusRecord> kept;
  if (model_) {
    const FeatureModels fm = model_->models(lex_);
    for (auto& r : raw) {
      const FeatureVector fv =
          extract_features(make_sentence(r.ja, Language::Ja, lex_), make_sentence(r.zh, Language::Zh, lex_), fm);
      r.filter_score = score_pair(*model_, fv);
      if (r.filter_score >= threshold_) {
        kept.push_back(std::move(r));
      } else {
        ++local.classifier_dropped;
      }
    }
  } else {
    for (auto& r : raw) r.filter_score = 1.0;
    kept = std::move(raw);
  }

  if (provider_ && !kept.empty()) {
    std::vector<std::pair<std::string, std::string>> pairs;
    pairs.reserve(kept.size());
    for (const auto& r : kept) pairs.emplace_back(r.ja, r.zh);
    const GateResult g = embedding_gate(pairs, *provider_, gate_);
    std::vector<CorpusRecord> gated;
    for (std::size_t i = 0; i < g.kept.size(); ++i) {
      CorpusRecord r = std::move(kept[g.kept[i]]);
      r.embed_sim = g.similarity[i];
      gated.push_back(std::move(r));
    }
    local.gate_threshold_dropped = g.dropped_threshold;
    local.gate_provider_dropped = g.dropped_provider;
    kept = std::move(gated);
  }

  if (hook_) {
    std::vector<CorpusRecord> passed;
    for (auto& r : kept) {
      if (hook_(r)) {
        passed.push_back(std::move(r));
      } else {
        ++local.hook_dropped;
      }
    }
    kept = std::move(passed);
  }
  if (counts) *counts = local;
  return kept;
}

FilterModel obtain_filter_model(const PipelineConfig& cfg, const Lexicon& lex, std::ostream* log) {
  if (!cfg.filter_model.empty() && fs::exists(cfg.filter_model)) return FilterModel::load(cfg.filter_model);
  if (cfg.filter_train.empty()) throw FatalError("filter model not found: " + cfg.filter_model);
  if (!fs::exists(cfg.filter_train)) throw FatalError("filter training data not found: " + cfg.filter_train);
  std::vector<TextPair> positives;
  for (auto& e : read_pair_tsv(cfg.filter_train)) positives.push_back({std::move(e.ja), std::move(e.zh)});
  if (log) *log << "training filter on " << positives.size() << " pairs\n";
  FilterTrainConfig tc = cfg.filter_train_cfg;
  tc.seed = cfg.seed;
  FilterModel model = train_filter(positives, lex, tc);
  fs::create_directories(cfg.out_dir);
  model.save((fs::path(cfg.out_dir) / "filter_model.json").string());
  return model;
}

std::vector<std::string> snapshot_dirs(const std::string& root) {
  if (!fs::is_directory(root)) throw FatalError("snapshot directory not found: " + root);
  if (fs::exists(fs::path(root) / "manifest.jsonl")) return {root};
  std::vector<std::string> dirs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory() && fs::exists(e.path() / "manifest.jsonl")) dirs.push_back(e.path().string());
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw FatalError("no snapshot manifests under " + root);
  return dirs;
}

namespace {

std::string site_dir_name(const std::string& host) {
  std::string out;
  for (char c : host) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') ? c : '_';
  return out.empty() ? "_" : out;
}

void write_site_status(const std::string& path, const SiteOutcome& o) {
  nlohmann::ordered_json j;
  j["host"] = o.site.host;
  j["source"] = std::string(to_string(o.site.source));
  j["failed"] = o.failed;
  j["failure"] = o.failure;
  j["pages"] = o.pages;
  j["docpairs"] = o.docpairs;
  j["raw_pairs"] = o.raw_pairs;
  j["records"] = o.records.size();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FatalError("cannot write " + path);
  out << j.dump() << '\n';
}

bool load_site_status(const std::string& dir, SiteOutcome& o) {
  const fs::path status = fs::path(dir) / "site.json";
  if (!fs::exists(status)) return false;
  std::ifstream in(status, std::ios::binary);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    if (j.at("host").get<std::string>() != o.site.host) return false;
    o.failed = j.at("failed").get<bool>();
    o.failure = j.at("failure").get<std::string>();
    o.pages = j.at("pages").get<std::size_t>();
    o.docpairs = j.at("docpairs").get<std::size_t>();
    o.raw_pairs = j.at("raw_pairs").get<std::size_t>();
  } catch (const nlohmann::json::exception&) {
    return false;
  }
  if (!o.failed) o.records = read_records_jsonl((fs::path(dir) / "filtered.jsonl").string());
  o.resumed = true;
  return true;
}

struct Runtime {
  const PipelineConfig& cfg;
  const PipelineHooks& hooks;
  const Lexicon& lex;
  const RecordFilter& filter;
  Fetcher& fetcher;
  bool snapshot = false;
  HostThrottle throttle;
  std::mutex log_mu;

  void log(const std::string& msg) {
    if (!hooks.log) return;
    std::lock_guard<std::mutex> lock(log_mu);
    *hooks.log << msg << '\n';
  }
};

SiteOutcome process_site(const CandidateSite& site, Runtime& rt) {
  SiteOutcome o;
  o.site = site;
  const fs::path dir = fs::path(rt.cfg.out_dir) / site_dir_name(site.host);
  if (rt.cfg.resume && load_site_status(dir.string(), o)) {
    rt.log("resume " + site.host);
    return o;
  }
  fs::create_directories(dir);
  try {
    ManualClock manual;
    SystemClock system;
    Clock& clock = rt.snapshot ? static_cast<Clock&>(manual) : static_cast<Clock&>(system);
    CrawlOptions opts;
    opts.user_agent = rt.cfg.user_agent;
    opts.fetch_timeout = rt.cfg.fetch_timeout;
    opts.throttle = rt.snapshot ? nullptr : &rt.throttle;
    CrawlResult crawl = crawl_site(site, rt.cfg.budget, rt.fetcher, clock, opts);
    o.pages = crawl.store.pages.size();
    fs::remove_all(dir / "pages");
    write_snapshot(crawl.store, (dir / "pages").string());
    if (crawl.failed) {
      o.failed = true;
      o.failure = crawl.failure;
    } else {
      MinedSite mined = mine_site(crawl.store, rt.lex, rt.cfg);
      o.docpairs = mined.docpairs.size();
      o.raw_pairs = mined.raw.size();
      write_docpair_audit((dir / "docpairs.jsonl").string(), mined.docpairs, mined.docs.ja, mined.docs.zh);
      write_ladders((dir / "ladder.tsv").string(), mined);
      write_records_jsonl((dir / "raw_pairs.jsonl").string(), mined.raw);
      o.records = rt.filter.apply(std::move(mined.raw));
      write_records_jsonl((dir / "filtered.jsonl").string(), o.records);
    }
  } catch (const FatalError&) {
    throw;
  } catch (const std::exception& e) {
    o.failed = true;
    o.failure = std::string("error: ") + e.what();
    o.records.clear();
  }
  write_site_status((dir / "site.json").string(), o);
  rt.log(site.host + (o.failed ? " failed (" + o.failure + ")" : ": " + std::to_string(o.records.size()) + " pairs"));
  return o;
}

std::vector<SiteOutcome> process_sites(const std::vector<CandidateSite>& sites, Runtime& rt) {
  std::vector<SiteOutcome> out(sites.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mu;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= sites.size()) return;
      try {
        out[i] = process_site(sites[i], rt);
      } catch (...) {
        std::lock_guard<std::mutex> lock(fatal_mu);
        if (!fatal) fatal = std::current_exception();
        next = sites.size();
      }
    }
  };
  const std::size_t n = std::min(rt.cfg.jobs, std::max<std::size_t>(sites.size(), 1));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < n; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (fatal) std::rethrow_exception(fatal);
  return out;
}

std::vector<CandidateSite> archive_sites(const PipelineConfig& cfg, Runtime& rt) {
  std::vector<CandidateSite> sites;
  if (!cfg.archive.empty()) {
    if (!fs::exists(cfg.archive)) throw FatalError("archive not found: " + cfg.archive);
    ArchiveScanner scanner(PublicSuffixList::builtin(), cfg.detector);
    const auto unreadable = for_each_archive_record(cfg.archive, [&](const ArchiveRecord& r) { scanner.add(r); });
    rt.log("archive: " + std::to_string(scanner.result().records) + " records, " +
           std::to_string(scanner.result().skipped + unreadable) + " skipped");
    sites = select_balanced_hosts(scanner.result().hosts, cfg.balance);
  }
  if (!cfg.candidates.empty()) {
    if (!fs::exists(cfg.candidates)) throw FatalError("candidate list not found: " + cfg.candidates);
    for (auto& s : read_candidates(cfg.candidates)) {
      if (s.source == SiteSource::Archive) sites.push_back(std::move(s));
    }
  }
  return sites;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg, const PipelineHooks& hooks) {
  cfg.validate();
  if (!cfg.submissions.empty() && !fs::exists(cfg.submissions))
    throw FatalError("submissions file not found: " + cfg.submissions);
  fs::create_directories(cfg.out_dir);

  const Lexicon lex = load_lexicon(cfg);
  std::unique_ptr<FilterModel> model;
  if (cfg.filter_enabled) model = std::make_unique<FilterModel>(obtain_filter_model(cfg, lex, hooks.log));

  std::unique_ptr<EmbeddingProvider> owned_provider;
  EmbeddingProvider* provider = nullptr;
  if (cfg.embedding_enabled) {
    if (hooks.embeddings) {
      provider = hooks.embeddings;
    } else if (!cfg.embedding_vectors.empty()) {
      owned_provider = std::make_unique<VectorFileProvider>(cfg.embedding_vectors);
      provider = owned_provider.get();
    } else {
      owned_provider =
          std::make_unique<HttpEmbeddingProvider>(cfg.embedding_endpoint, cfg.embedding_timeout, cfg.embedding_batch);
      provider = owned_provider.get();
    }
  }
  const RecordFilter filter(model.get(), lex, cfg.filter_threshold, provider, cfg.gate, hooks.keep_record);

  std::unique_ptr<Fetcher> owned_fetcher;
  Fetcher* fetcher = hooks.fetcher;
  const bool snapshot = !cfg.snapshot_dir.empty();
  if (!fetcher) {
    if (snapshot) {
      owned_fetcher = make_snapshot_fetcher(snapshot_dirs(cfg.snapshot_dir));
    } else {
      owned_fetcher = std::make_unique<HttpFetcher>(cfg.user_agent);
    }
    fetcher = owned_fetcher.get();
  }

  Runtime rt{cfg, hooks, lex, filter, *fetcher, snapshot || hooks.fetcher != nullptr, {}, {}};

  PipelineResult result;
  const bool has_archive = !cfg.archive.empty() || !cfg.candidates.empty();
  const bool has_crowd = !cfg.submissions.empty();

  std::vector<CandidateSite> sites = archive_sites(cfg, rt);
  const std::size_t n_archive = sites.size();
  if (has_crowd) {
    IntakeOptions io;
    io.timeout = cfg.fetch_timeout;
    io.parallelism = cfg.fetch_parallelism;
    io.detector = cfg.detector;
    UrlPairIntake intake = ingest_url_pairs(cfg.submissions, *fetcher, io);
    write_submission_status((fs::path(cfg.out_dir) / "submissions_status.tsv").string(), intake.submissions);
    result.submissions = std::move(intake.submissions);
    for (auto& s : intake.sites) sites.push_back(std::move(s));
  }
  write_candidates((fs::path(cfg.out_dir) / "candidates.jsonl").string(), sites);

  result.sites = process_sites(sites, rt);

  SiteReport archive{SiteSource::Archive};
  SiteReport crowd{SiteSource::Crowd};
  archive.n_urls = n_archive;
  crowd.n_urls = result.submissions.size();
  for (const auto& s : result.submissions) {
    if (s.status == UrlPairSubmission::Status::Error) ++crowd.n_errors;
  }
  Deduplicator dedup(cfg.dedup);
  for (std::size_t i = 0; i < result.sites.size(); ++i) {
    const SiteOutcome& o = result.sites[i];
    SiteReport& rep = i < n_archive ? archive : crowd;
    if (o.failed) {
      ++rep.n_errors;
      continue;
    }
    if (!o.records.empty()) ++rep.n_extracted;
    for (const auto& r : o.records) {
      if (!dedup.admit(r)) continue;
      result.corpus.push_back(r);
      ++rep.n_sentences;
    }
  }
  archive.n_crawled = archive.n_urls - archive.n_errors;
  crowd.n_crawled = crowd.n_urls - crowd.n_errors;
  if (has_archive) result.reports.push_back(archive);
  if (has_crowd) result.reports.push_back(crowd);
  result.site_errors = archive.n_errors + crowd.n_errors;

  const fs::path out(cfg.out_dir);
  write_records_jsonl((out / "corpus.jsonl").string(), result.corpus);
  write_records_tsv((out / "corpus.tsv").string(), result.corpus);
  for (const auto& [name, fmt] : {std::pair{"report.tsv", ReportFormat::Tsv}, std::pair{"report.json", ReportFormat::Json},
                                  std::pair{"report.md", ReportFormat::Markdown}}) {
    std::ofstream f(out / name, std::ios::binary);
    if (!f) throw FatalError(std::string("cannot write report ") + name);
    f << emit_report(result.reports, fmt);
  }
  rt.log("corpus: " + std::to_string(result.corpus.size()) + " pairs");
  return result;
}

}  // namespace localmine
