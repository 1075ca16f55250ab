#include "localmine/crawler.hpp"

#include <algorithm>
#include <deque>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "localmine/error.hpp"
#include "localmine/html.hpp"
#include "localmine/robots.hpp"

namespace localmine {

namespace fs = std::filesystem;
using json = nlohmann::json;

void CrawlBudget::validate() const {
  if (max_seconds <= 0 || max_pages <= 0 || max_bytes <= 0 || per_host_delay_ms <= 0)
    throw FatalError("crawl budget limits must all be positive");
}

std::uint64_t PageStore::total_bytes() const {
  std::uint64_t n = 0;
  for (const auto& p : pages) n += p.body.size();
  return n;
}

ContentKind classify_content(std::string_view content_type, std::string_view body) {
  std::string ct;
  for (char c : content_type.substr(0, content_type.find(';'))) {
    if (!std::isspace(static_cast<unsigned char>(c))) ct.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (ct == "text/html" || ct == "application/xhtml+xml") return ContentKind::Html;
  if (ct == "application/pdf") return ContentKind::Pdf;
  if (ct == "application/msword" || ct == "application/vnd.openxmlformats-officedocument.wordprocessingml.document")
    return ContentKind::Word;
  if (ct.empty()) {
    if (body.substr(0, 5) == "%PDF-") return ContentKind::Pdf;
    const auto first = body.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && body[first] == '<') return ContentKind::Html;
  }
  return ContentKind::Other;
}

void HostThrottle::wait_turn(const std::string& host, std::int64_t delay_ms, Clock& clock) {
  std::int64_t wait = 0;
  {
    std::lock_guard lock(mu_);
    const std::int64_t now = clock.now_ms();
    auto it = next_slot_.find(host);
    std::int64_t start = now;
    if (it != next_slot_.end() && it->second > now) start = it->second;
    wait = start - now;
    next_slot_[host] = start + delay_ms;
  }
  clock.sleep_ms(wait);
}

CrawlResult crawl_site(const CandidateSite& site, const CrawlBudget& budget, Fetcher& fetch, Clock& clock,
                       const CrawlOptions& opts) {
  budget.validate();
  CrawlResult result;
  result.store.host = site.host;

  std::set<std::string> allowed_domains;
  std::deque<std::string> frontier;
  std::unordered_set<std::string> seen;
  for (const auto& seed : site.seed_urls) {
    const auto u = Url::parse(seed);
    if (!u) continue;
    allowed_domains.insert(opts.psl->registrable_domain(u->host));
    if (seen.insert(u->str()).second) frontier.push_back(u->str());
  }
  if (!site.host.empty()) allowed_domains.insert(site.host);

  HostThrottle local_throttle;
  HostThrottle& throttle = opts.throttle ? *opts.throttle : local_throttle;
  std::map<std::string, RobotsRules> robots;
  const std::int64_t started = clock.now_ms();
  std::uint64_t seeds_blocked = 0;
  const std::size_t seed_count = frontier.size();
  std::size_t popped = 0;

  auto out_of_time = [&]() { return clock.now_ms() - started >= budget.max_seconds * 1000; };

  while (!frontier.empty()) {
    if (out_of_time() || result.stats.fetched >= static_cast<std::uint64_t>(budget.max_pages)) break;
    const std::string url = frontier.front();
    frontier.pop_front();
    const bool is_seed = popped++ < seed_count;
    const Url u = *Url::parse(url);
    const std::string origin = u.origin();

    auto rit = robots.find(origin);
    if (rit == robots.end()) {
      throttle.wait_turn(u.host, budget.per_host_delay_ms, clock);
      const auto r = fetch.fetch(origin + "/robots.txt", opts.fetch_timeout);
      ++result.stats.robots_fetches;
      RobotsRules rules = r.ok() ? RobotsRules::parse(r.body, opts.user_agent) : RobotsRules::allow_all();
      rit = robots.emplace(origin, std::move(rules)).first;
      if (out_of_time()) break;
    }
    if (!rit->second.allowed(u.path_and_query())) {
      ++result.stats.robots_blocked;
      if (is_seed) ++seeds_blocked;
      continue;
    }

    throttle.wait_turn(u.host, std::max(budget.per_host_delay_ms, rit->second.crawl_delay_ms()), clock);
    FetchResponse resp = fetch.fetch(url, opts.fetch_timeout);
    ++result.stats.fetched;
    if (!resp.ok()) {
      ++result.stats.fetch_errors;
      continue;
    }
    const ContentKind kind = classify_content(resp.content_type, resp.body);
    if (kind == ContentKind::Other) {
      ++result.stats.skipped_content;
      continue;
    }
    if (result.store.total_bytes() + resp.body.size() > static_cast<std::uint64_t>(budget.max_bytes)) break;
    if (kind != ContentKind::Html) ++result.stats.binary_documents;

    if (kind == ContentKind::Html) {
      try {
        const ParsedHtml page = parse_html(decode_html_bytes(resp.body));
        Url base = u;
        if (!page.base_href.empty()) {
          if (auto b = u.resolve(page.base_href)) base = *b;
        }
        for (const auto& href : page.links) {
          const auto target = base.resolve(href);
          if (!target) continue;
          if (!allowed_domains.count(opts.psl->registrable_domain(target->host))) {
            ++result.stats.off_domain_links;
            continue;
          }
          const std::string t = target->str();
          if (seen.insert(t).second) frontier.push_back(t);
        }
      } catch (const Error&) {
        // undecodable page: stored, but contributes no links
      }
    }
    result.store.pages.push_back({url, resp.content_type, std::move(resp.body), clock.now_ms() - started});
  }

  if (result.store.pages.empty()) {
    result.failed = true;
    result.failure = (seed_count > 0 && seeds_blocked == seed_count) ? "robots" : "unreachable";
  }
  return result;
}

std::vector<SnapshotEntry> read_snapshot_manifest(const std::string& dir) {
  const fs::path manifest = fs::path(dir) / "manifest.jsonl";
  std::ifstream in(manifest);
  if (!in) throw FatalError("missing snapshot manifest: " + manifest.string());
  std::vector<SnapshotEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      SnapshotEntry e;
      e.file = j.at("file").get<std::string>();
      e.url = j.at("url").get<std::string>();
      e.content_type = j.value("content_type", std::string{});
      e.status = j.value("status", 200);
      out.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw FatalError("bad manifest line " + std::to_string(lineno) + " in " + manifest.string() + ": " + ex.what());
    }
  }
  return out;
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FatalError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_robots(const std::string& url) {
  const auto u = Url::parse(url);
  return u && u->path == "/robots.txt";
}

}  // namespace

PageStore load_snapshot(const std::string& dir) {
  PageStore store;
  for (const auto& e : read_snapshot_manifest(dir)) {
    if (is_robots(e.url) || e.status < 200 || e.status >= 300) continue;
    const auto u = Url::parse(e.url);
    if (!u) throw FatalError("bad URL in snapshot manifest: " + e.url);
    if (store.host.empty()) store.host = registrable_domain(u->host);
    store.pages.push_back({u->str(), e.content_type, read_file(fs::path(dir) / e.file), 0});
  }
  return store;
}

std::unique_ptr<InMemoryFetcher> make_snapshot_fetcher(const std::vector<std::string>& dirs) {
  auto fetcher = std::make_unique<InMemoryFetcher>();
  for (const auto& dir : dirs) {
    for (const auto& e : read_snapshot_manifest(dir)) {
      fetcher->add(e.url, e.content_type, read_file(fs::path(dir) / e.file), e.status);
    }
  }
  return fetcher;
}

void write_snapshot(const PageStore& store, const std::string& dir) {
  fs::create_directories(dir);
  std::ofstream manifest(fs::path(dir) / "manifest.jsonl", std::ios::binary | std::ios::trunc);
  if (!manifest) throw FatalError("cannot write snapshot manifest in " + dir);
  for (std::size_t i = 0; i < store.pages.size(); ++i) {
    const auto& p = store.pages[i];
    const char* ext = ".bin";
    switch (classify_content(p.content_type, p.body)) {
      case ContentKind::Html:
        ext = ".html";
        break;
      case ContentKind::Pdf:
        ext = ".pdf";
        break;
      case ContentKind::Word:
        ext = ".doc";
        break;
      case ContentKind::Other:
        break;
    }
    char name[32];
    std::snprintf(name, sizeof name, "%06zu%s", i + 1, ext);
    std::ofstream body(fs::path(dir) / name, std::ios::binary | std::ios::trunc);
    body << p.body;
    json j = {{"file", name}, {"url", p.url}, {"content_type", p.content_type}, {"fetch_time_ms", p.fetch_time_ms}};
    manifest << j.dump() << '\n';
  }
}

}  // namespace localmine
