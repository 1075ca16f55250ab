#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "localmine/crawler.hpp"
#include "localmine/error.hpp"
#include "localmine/hash.hpp"
#include "localmine/html.hpp"
#include "localmine/robots.hpp"
#include "localmine/url.hpp"
#include "oracles.hpp"

using namespace localmine;
namespace fs = std::filesystem;

namespace {

class CountingFetcher : public Fetcher {
 public:
  explicit CountingFetcher(Fetcher& inner) : inner_(inner) {}
  FetchResponse fetch(const std::string& url, std::chrono::milliseconds timeout) override {
    urls.push_back(url);
    return inner_.fetch(url, timeout);
  }
  std::size_t page_fetches() const {
    std::size_t n = 0;
    for (const auto& u : urls) n += u.find("/robots.txt") == std::string::npos;
    return n;
  }
  std::vector<std::string> urls;

 private:
  Fetcher& inner_;
};

nlohmann::json crawl30_links() {
  return nlohmann::json::parse(oracle::read_file(oracle::fixture("crawl30/links.json")));
}

CandidateSite crawl30_site() {
  CandidateSite s;
  s.host = "crawl-test.jp";
  s.seed_urls = {crawl30_links().at("seed").get<std::string>()};
  return s;
}

std::unique_ptr<InMemoryFetcher> crawl30_fetcher() {
  return make_snapshot_fetcher({oracle::fixture("crawl30/site"), oracle::fixture("crawl30/offsite")});
}

}  // namespace

TEST(Url, ParseAndResolve) {
  const auto u = Url::parse("HTTP://Www.Example.JP:80/a/b.html?x=1#frag");
  ASSERT_TRUE(u);
  EXPECT_EQ(u->host, "www.example.jp");
  EXPECT_EQ(u->str(), "http://www.example.jp/a/b.html?x=1");
  EXPECT_EQ(u->resolve("../c.html")->str(), "http://www.example.jp/c.html");
  EXPECT_EQ(u->resolve("//cdn.example.com/x")->host, "cdn.example.com");
  EXPECT_FALSE(u->resolve("mailto:a@b.jp"));
  EXPECT_FALSE(Url::parse("ftp://example.com/"));
}

TEST(Url, RegistrableDomain) {
  EXPECT_EQ(registrable_domain("http://www.nicchu-shoji.co.jp/ja/"), "nicchu-shoji.co.jp");
  EXPECT_EQ(registrable_domain("a.b.example.com"), "example.com");
  EXPECT_EQ(registrable_domain("www.shanghai-trade.com.cn"), "shanghai-trade.com.cn");
  const auto psl = PublicSuffixList::from_string("*.ck\n!www.ck\ncom\n");
  EXPECT_EQ(psl.registrable_domain("a.b.ck"), "a.b.ck");
  EXPECT_EQ(psl.registrable_domain("www.ck"), "www.ck");
  EXPECT_EQ(psl.registrable_domain("x.y.com"), "y.com");
}

TEST(Robots, LongestMatchAllowWinsTies) {
  const auto r = RobotsRules::parse(
      "User-agent: other\nDisallow: /\n\nUser-agent: *\nDisallow: /private\nAllow: /private/open\n"
      "Disallow: /*.pdf$\nCrawl-delay: 2\n",
      "localmine");
  EXPECT_TRUE(r.allowed("/"));
  EXPECT_FALSE(r.allowed("/private/x"));
  EXPECT_TRUE(r.allowed("/private/open/y"));
  EXPECT_FALSE(r.allowed("/docs/a.pdf"));
  EXPECT_TRUE(r.allowed("/docs/a.pdf?x"));
  EXPECT_EQ(r.crawl_delay_ms(), 2000);
  const auto tie = RobotsRules::parse("User-agent: *\nDisallow: /a\nAllow: /a\n", "x");
  EXPECT_TRUE(tie.allowed("/a"));
}

TEST(ExtractText, ParagraphsAndDigest) {
  const auto t = extract_text("<p>你好</p><p>世界</p>");
  EXPECT_EQ(t.text, "你好\n世界");
  EXPECT_EQ(t.tag_digest, (std::vector<TagCode>{TagCode::P, TagCode::P}));
}

TEST(ExtractText, ScriptStripped) { EXPECT_EQ(extract_text("<script>x=1</script><p>hi</p>").text, "hi"); }

TEST(ExtractText, NoControlCharacters) {
  std::mt19937_64 rng(12);
  const std::vector<std::string> parts = {"<p>", "</p>", "<div>", "\t", "\r\n", "\x01", "<br>", "日本", "&amp;",
                                          "<!-- c -->", "<style>a{}</style>", "x", " ", "\x7f", "<li>"};
  for (int i = 0; i < 300; ++i) {
    std::string html;
    for (int k = 0; k < 20; ++k) html += parts[bounded_uniform(rng, parts.size())];
    const auto t = extract_text(html);
    for (unsigned char c : t.text) EXPECT_TRUE(c == '\n' || (c >= 0x20 && c != 0x7f)) << int(c);
  }
}

TEST(ExtractText, ShiftJisMeta) {
  const std::string sjis = "<meta charset=\"shift_jis\"><p>\x93\xfa\x96\x7b</p>";  // 日本
  EXPECT_EQ(extract_text(sjis).text, "日本");
}

TEST(Snapshot, EmptyManifest) {
  const fs::path dir = fs::temp_directory_path() / "localmine_empty_snapshot";
  fs::create_directories(dir);
  std::ofstream(dir / "manifest.jsonl").close();
  EXPECT_TRUE(load_snapshot(dir.string()).pages.empty());
  fs::remove_all(dir);
}

TEST(Snapshot, ThreeFilesRoundTrip) {
  const fs::path dir = fs::temp_directory_path() / "localmine_three_snapshot";
  fs::remove_all(dir);
  PageStore store;
  store.host = "example.jp";
  for (int i = 0; i < 3; ++i)
    store.pages.push_back({"http://www.example.jp/" + std::to_string(i) + ".html", "text/html", "<p>" + std::to_string(i) + "</p>", i});
  write_snapshot(store, dir.string());
  const auto back = load_snapshot(dir.string());
  ASSERT_EQ(back.pages.size(), 3u);
  EXPECT_EQ(back.pages[2].url, store.pages[2].url);
  EXPECT_EQ(back.pages[2].body, store.pages[2].body);
  fs::remove_all(dir);
}

TEST(Snapshot, E2eSitePageCountMatchesManifest) {
  const auto entries = read_snapshot_manifest(oracle::fixture("e2e/site"));
  std::size_t non_robots = 0;
  for (const auto& e : entries) non_robots += e.url.find("/robots.txt") == std::string::npos;
  EXPECT_EQ(load_snapshot(oracle::fixture("e2e/site")).pages.size(), non_robots);
}

TEST(Snapshot, MissingManifestIsFatal) { EXPECT_THROW(read_snapshot_manifest("/nonexistent/dir"), FatalError); }

TEST(Crawl, BudgetCapInBfsOrder) {
  const auto fetcher = crawl30_fetcher();
  const auto bfs = crawl30_links().at("bfs_order").get<std::vector<std::string>>();
  CountingFetcher counting(*fetcher);
  ManualClock clock;
  CrawlBudget b;
  b.max_pages = 5;
  const auto r = crawl_site(crawl30_site(), b, counting, clock);
  ASSERT_EQ(r.store.pages.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(r.store.pages[i].url, bfs[i]);
  EXPECT_EQ(counting.page_fetches(), 5u);
}

TEST(Crawl, OffDomainNeverFetched) {
  const auto fetcher = crawl30_fetcher();
  CountingFetcher counting(*fetcher);
  ManualClock clock;
  const auto r = crawl_site(crawl30_site(), {}, counting, clock);
  EXPECT_EQ(r.store.pages.size(), 30u);
  const auto off = crawl30_links().at("off_domain").get<std::vector<std::string>>();
  for (const auto& u : counting.urls)
    for (const auto& o : off) EXPECT_NE(u, o);
  for (const auto& p : r.store.pages) EXPECT_EQ(registrable_domain(p.url), "crawl-test.jp");
  EXPECT_GE(r.stats.off_domain_links, 3u);
}

TEST(Crawl, BudgetSafetyProperty) {
  const auto fetcher = crawl30_fetcher();
  std::mt19937_64 rng(30);
  for (int i = 0; i < 25; ++i) {
    CrawlBudget b;
    b.max_pages = 1 + static_cast<std::int64_t>(bounded_uniform(rng, 40));
    b.max_bytes = 200 + static_cast<std::int64_t>(bounded_uniform(rng, 20000));
    CountingFetcher counting(*fetcher);
    ManualClock clock;
    const auto r = crawl_site(crawl30_site(), b, counting, clock);
    EXPECT_LE(static_cast<std::int64_t>(counting.page_fetches()), b.max_pages);
    EXPECT_LE(static_cast<std::int64_t>(r.store.total_bytes()), b.max_bytes);
  }
}

TEST(Crawl, TimeBudgetAndPoliteness) {
  const auto fetcher = crawl30_fetcher();
  ManualClock clock;
  CrawlBudget b;
  b.per_host_delay_ms = 1000;
  b.max_seconds = 10;
  const auto r = crawl_site(crawl30_site(), b, *fetcher, clock);
  EXPECT_GE(r.store.pages.size(), 9u);
  EXPECT_LE(r.store.pages.size(), 11u);
  for (std::size_t i = 1; i < r.store.pages.size(); ++i)
    EXPECT_GE(r.store.pages[i].fetch_time_ms - r.store.pages[i - 1].fetch_time_ms, 1000);
}

TEST(Crawl, RobotsDisallowAll) {
  InMemoryFetcher f;
  f.add("http://www.closed.jp/robots.txt", "text/plain", "User-agent: *\nDisallow: /\n");
  f.add("http://www.closed.jp/", "text/html", "<p>日本語</p>");
  CandidateSite s{"closed.jp", {"http://www.closed.jp/"}};
  ManualClock clock;
  const auto r = crawl_site(s, {}, f, clock);
  EXPECT_TRUE(r.store.pages.empty());
  EXPECT_TRUE(r.failed);
  EXPECT_EQ(r.failure, "robots");
}

TEST(Crawl, UnreachableSeed) {
  InMemoryFetcher f;
  CandidateSite s{"gone.jp", {"http://www.gone.jp/"}};
  ManualClock clock;
  const auto r = crawl_site(s, {}, f, clock);
  EXPECT_TRUE(r.failed);
  EXPECT_EQ(r.failure, "unreachable");
}

TEST(Crawl, BinaryDocumentsSkipped) {
  InMemoryFetcher f;
  f.add("http://www.docs.jp/", "text/html", "<a href=\"a.pdf\">x</a><a href=\"b.html\">y</a><p>日本語</p>");
  f.add("http://www.docs.jp/a.pdf", "application/pdf", "%PDF-1.4");
  f.add("http://www.docs.jp/b.html", "text/html", "<p>中文</p>");
  CandidateSite s{"docs.jp", {"http://www.docs.jp/"}};
  ManualClock clock;
  const auto r = crawl_site(s, {}, f, clock);
  // Binary bodies are stored for an extractor plug-in and counted.
  ASSERT_EQ(r.store.pages.size(), 3u);
  EXPECT_EQ(r.stats.binary_documents, 1u);
  std::size_t pdfs = 0;
  for (const auto& p : r.store.pages) pdfs += classify_content(p.content_type, p.body) == ContentKind::Pdf;
  EXPECT_EQ(pdfs, 1u);
  EXPECT_EQ(classify_content("application/pdf", ""), ContentKind::Pdf);
  EXPECT_EQ(classify_content("", "%PDF-1.7"), ContentKind::Pdf);
}

TEST(Crawl, InvalidBudgetIsFatal) {
  CrawlBudget b;
  b.max_pages = 0;
  EXPECT_THROW(b.validate(), FatalError);
}
