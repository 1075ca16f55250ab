#include "localmine/discovery.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "localmine/error.hpp"
#include "localmine/html.hpp"

namespace localmine {

using json = nlohmann::json;

HostStats& HostStats::operator+=(const HostStats& o) {
  if (host.empty()) host = o.host;
  bytes_ja += o.bytes_ja;
  bytes_zh += o.bytes_zh;
  bytes_other += o.bytes_other;
  page_count += o.page_count;
  return *this;
}

std::string_view to_string(SiteSource s) { return s == SiteSource::Archive ? "ARCHIVE" : "CROWD"; }

SiteSource parse_site_source(std::string_view s) {
  if (s == "ARCHIVE") return SiteSource::Archive;
  if (s == "CROWD") return SiteSource::Crowd;
  throw Error("unknown site source: " + std::string(s));
}

std::string to_jsonl(const CandidateSite& site) {
  json j = {{"host", site.host},
            {"seed_urls", site.seed_urls},
            {"source", to_string(site.source)},
            {"balance", site.balance},
            {"bytes_ja", site.bytes_ja},
            {"bytes_zh", site.bytes_zh}};
  return j.dump();
}

CandidateSite candidate_from_json(std::string_view line) {
  const json j = json::parse(line);
  CandidateSite s;
  s.host = j.at("host").get<std::string>();
  s.seed_urls = j.at("seed_urls").get<std::vector<std::string>>();
  s.source = parse_site_source(j.at("source").get<std::string>());
  s.balance = j.value("balance", 0.0);
  s.bytes_ja = j.value("bytes_ja", std::uint64_t{0});
  s.bytes_zh = j.value("bytes_zh", std::uint64_t{0});
  if (s.seed_urls.empty()) throw Error("candidate site without seed URLs: " + s.host);
  for (const auto& u : s.seed_urls) {
    if (!Url::parse(u)) throw Error("candidate seed is not an absolute URL: " + u);
  }
  return s;
}

void write_candidates(const std::string& path, const std::vector<CandidateSite>& sites) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FatalError("cannot write " + path);
  for (const auto& s : sites) out << to_jsonl(s) << '\n';
}

std::vector<CandidateSite> read_candidates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FatalError("cannot read candidate list " + path);
  std::vector<CandidateSite> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(candidate_from_json(line));
    } catch (const std::exception& e) {
      throw FatalError("bad candidate line in " + path + ": " + e.what());
    }
  }
  return out;
}

void ArchiveScan::merge(const ArchiveScan& other) {
  for (const auto& [host, stats] : other.hosts) hosts[host] += stats;
  records += other.records;
  skipped += other.skipped;
}

void ArchiveScanner::add(const ArchiveRecord& record) {
  ++scan_.records;
  const auto url = Url::parse(record.url);
  if (!url) {
    ++scan_.skipped;
    return;
  }
  std::string text;
  try {
    text = extract_text(record.payload).text;
  } catch (const Error&) {
    ++scan_.skipped;
    return;
  }
  const std::string host = psl_->registrable_domain(url->host);
  HostStats& stats = scan_.hosts[host];
  stats.host = host;
  ++stats.page_count;
  if (text.empty()) return;
  switch (detect_language(text, det_).lang) {
    case Language::Ja:
      stats.bytes_ja += text.size();
      break;
    case Language::Zh:
      stats.bytes_zh += text.size();
      break;
    case Language::Other:
      stats.bytes_other += text.size();
      break;
  }
}

ArchiveScan scan_archive(const std::vector<ArchiveRecord>& records, const PublicSuffixList& psl) {
  ArchiveScanner scanner(psl);
  for (const auto& r : records) scanner.add(r);
  return scanner.result();
}

double balance_of(const HostStats& s) {
  const auto hi = std::max(s.bytes_ja, s.bytes_zh);
  if (hi == 0) return 0.0;
  return static_cast<double>(std::min(s.bytes_ja, s.bytes_zh)) / static_cast<double>(hi);
}

std::vector<CandidateSite> select_balanced_hosts(const std::map<std::string, HostStats>& stats,
                                                 const BalanceCriteria& criteria) {
  if (!(criteria.min_balance > 0.0 && criteria.min_balance <= 1.0)) throw Error("min_balance must be in (0,1]");
  if (criteria.limit < 1) throw Error("limit must be at least 1");
  std::vector<const HostStats*> kept;
  for (const auto& [host, s] : stats) {
    if (std::min(s.bytes_ja, s.bytes_zh) < criteria.min_bytes) continue;
    if (balance_of(s) < criteria.min_balance) continue;
    kept.push_back(&s);
  }
  std::sort(kept.begin(), kept.end(), [](const HostStats* a, const HostStats* b) {
    const auto ta = a->bytes_ja + a->bytes_zh;
    const auto tb = b->bytes_ja + b->bytes_zh;
    if (ta != tb) return ta > tb;
    return a->host < b->host;
  });
  if (kept.size() > criteria.limit) kept.resize(criteria.limit);
  std::vector<CandidateSite> out;
  for (const HostStats* s : kept) {
    CandidateSite c;
    c.host = s->host;
    c.seed_urls = {"http://" + s->host + "/"};
    c.source = SiteSource::Archive;
    c.balance = balance_of(*s);
    c.bytes_ja = s->bytes_ja;
    c.bytes_zh = s->bytes_zh;
    out.push_back(std::move(c));
  }
  return out;
}

std::string_view to_string(SubmissionError e) {
  switch (e) {
    case SubmissionError::Unreachable:
      return "UNREACHABLE";
    case SubmissionError::WrongLanguage:
      return "WRONG_LANGUAGE";
    case SubmissionError::DuplicateHost:
      return "DUPLICATE_HOST";
    case SubmissionError::MalformedUrl:
      return "MALFORMED_URL";
    case SubmissionError::SameUrl:
      return "SAME_URL";
  }
  return "UNREACHABLE";
}

std::string UrlPairSubmission::status_string() const {
  switch (status) {
    case Status::Pending:
      return "PENDING";
    case Status::Valid:
      return "VALID";
    case Status::Error:
      return "ERROR(" + std::string(to_string(reason)) + ")";
  }
  return "PENDING";
}

namespace {

struct TopPage {
  bool ok = false;
  Language lang = Language::Other;
  std::uint64_t bytes = 0;
};

TopPage probe(const Url& url, Fetcher& fetch, const IntakeOptions& opts) {
  TopPage out;
  const FetchResponse r = fetch.fetch(url.str(), opts.timeout);
  if (!r.ok()) return out;
  out.ok = true;
  try {
    const std::string text = extract_text(r.body).text;
    out.bytes = text.size();
    if (!text.empty()) out.lang = detect_language(text, opts.detector).lang;
  } catch (const Error&) {
    out.lang = Language::Other;
  }
  return out;
}

struct RowCheck {
  std::uint64_t bytes_ja = 0;
  std::uint64_t bytes_zh = 0;
};

}  // namespace

UrlPairIntake validate_url_pairs(std::vector<UrlPairSubmission> rows, Fetcher& fetch, const IntakeOptions& opts) {
  std::vector<RowCheck> checks(rows.size());
  auto check_row = [&](std::size_t i) {
    auto& row = rows[i];
    auto fail = [&](SubmissionError e) {
      row.status = UrlPairSubmission::Status::Error;
      row.reason = e;
    };
    const auto ja = Url::parse(row.url_ja);
    const auto zh = Url::parse(row.url_zh);
    if (!ja || !zh) return fail(SubmissionError::MalformedUrl);
    if (ja->str() == zh->str()) return fail(SubmissionError::SameUrl);
    const TopPage pj = probe(*ja, fetch, opts);
    const TopPage pz = probe(*zh, fetch, opts);
    if (!pj.ok || !pz.ok) return fail(SubmissionError::Unreachable);
    if (pj.lang != Language::Ja || pz.lang != Language::Zh) return fail(SubmissionError::WrongLanguage);
    checks[i] = {pj.bytes, pz.bytes};
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(opts.parallelism, rows.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) check_row(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) check_row(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  UrlPairIntake out;
  std::set<std::string> hosts;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& row = rows[i];
    if (row.status == UrlPairSubmission::Status::Error) continue;
    const std::string host = opts.psl->registrable_domain(Url::parse(row.url_ja)->host);
    if (!hosts.insert(host).second) {
      row.status = UrlPairSubmission::Status::Error;
      row.reason = SubmissionError::DuplicateHost;
      continue;
    }
    row.status = UrlPairSubmission::Status::Valid;
    CandidateSite site;
    site.host = host;
    site.seed_urls = {Url::parse(row.url_ja)->str(), Url::parse(row.url_zh)->str()};
    site.source = SiteSource::Crowd;
    site.bytes_ja = checks[i].bytes_ja;
    site.bytes_zh = checks[i].bytes_zh;
    const auto hi = std::max(site.bytes_ja, site.bytes_zh);
    site.balance = hi ? static_cast<double>(std::min(site.bytes_ja, site.bytes_zh)) / static_cast<double>(hi) : 0.0;
    out.sites.push_back(std::move(site));
  }
  out.submissions = std::move(rows);
  return out;
}

UrlPairIntake ingest_url_pairs(const std::string& path, Fetcher& fetch, const IntakeOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FatalError("cannot read submissions file " + path);
  std::vector<UrlPairSubmission> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    UrlPairSubmission row;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    if (cols.size() >= 1) row.url_ja = cols[0];
    if (cols.size() >= 2) row.url_zh = cols[1];
    if (cols.size() >= 3) row.worker_id = cols[2];
    if (cols.size() < 2) {
      row.status = UrlPairSubmission::Status::Error;
      row.reason = SubmissionError::MalformedUrl;
    }
    rows.push_back(std::move(row));
  }
  return validate_url_pairs(std::move(rows), fetch, opts);
}

void write_submission_status(const std::string& path, const std::vector<UrlPairSubmission>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FatalError("cannot write " + path);
  for (const auto& r : rows) out << r.url_ja << '\t' << r.url_zh << '\t' << r.worker_id << '\t' << r.status_string() << '\n';
}

}  // namespace localmine
