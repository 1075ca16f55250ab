#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <set>

#include <json.hpp>

#include "localmine/crawler.hpp"
#include "localmine/discovery.hpp"
#include "localmine/error.hpp"
#include "localmine/hash.hpp"
#include "localmine/warc.hpp"
#include "oracles.hpp"

using namespace localmine;
namespace fs = std::filesystem;

namespace {

std::string repeat(const std::string& s, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) out += s;
  return out;
}

std::vector<ArchiveRecord> read_archive() {
  std::vector<ArchiveRecord> records;
  const auto bad = for_each_archive_record(oracle::fixture("archive/archive.warc.gz"),
                                           [&](const ArchiveRecord& r) { records.push_back(r); });
  EXPECT_EQ(bad, 0u);
  return records;
}

}  // namespace

TEST(ScanArchive, ThreePagesOneHost) {
  const std::string ja = "<html><body><p>" + repeat("あ", 333) + "x</p></body></html>";
  const std::string zh = "<html><body><p>" + repeat("中", 500) + "</p></body></html>";
  const auto scan = scan_archive({{"http://www.example.jp/a", ja}, {"http://www.example.jp/b", ja},
                                  {"http://www.example.jp/c", zh}});
  ASSERT_EQ(scan.hosts.size(), 1u);
  const HostStats& h = scan.hosts.at("example.jp");
  EXPECT_EQ(h.bytes_ja, 2000u);
  EXPECT_EQ(h.bytes_zh, 1500u);
  EXPECT_EQ(h.page_count, 3u);
}

TEST(ScanArchive, EmptyStream) { EXPECT_TRUE(scan_archive({}).hosts.empty()); }

TEST(ScanArchive, FixtureMatchesManifest) {
  const auto manifest = nlohmann::json::parse(oracle::read_file(oracle::fixture("archive/manifest.json")));
  const auto records = read_archive();
  EXPECT_EQ(records.size(), manifest.at("records").get<std::size_t>());
  const auto scan = scan_archive(records);
  ASSERT_EQ(scan.hosts.size(), manifest.at("hosts").size());
  for (const auto& [host, want] : manifest.at("hosts").items()) {
    const HostStats& got = scan.hosts.at(host);
    EXPECT_EQ(got.bytes_ja, want.at("bytes_ja").get<std::uint64_t>()) << host;
    EXPECT_EQ(got.bytes_zh, want.at("bytes_zh").get<std::uint64_t>()) << host;
    EXPECT_EQ(got.bytes_other, want.at("bytes_other").get<std::uint64_t>()) << host;
    EXPECT_EQ(got.page_count, want.at("page_count").get<std::uint64_t>()) << host;
  }
}

TEST(ScanArchive, OrderIndependent) {
  auto records = read_archive();
  const auto base = scan_archive(records);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 5; ++i) {
    seeded_shuffle(records.begin(), records.end(), rng);
    EXPECT_EQ(scan_archive(records).hosts, base.hosts);
  }
}

TEST(ScanArchive, WarcRoundTrip) {
  const fs::path p = fs::temp_directory_path() / "localmine_roundtrip.warc.gz";
  const std::vector<ArchiveRecord> recs = {{"http://a.example.com/", "<p>日本語です</p>"},
                                           {"http://b.example.com/x", "<p>中文</p>"}};
  write_warc_gz(p.string(), recs);
  WarcReader reader(p.string());
  ArchiveRecord r;
  std::vector<ArchiveRecord> back;
  while (reader.next(r)) back.push_back(r);
  EXPECT_FALSE(reader.malformed());
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].url, recs[1].url);
  EXPECT_EQ(back[1].payload, recs[1].payload);
  fs::remove(p);
}

TEST(SelectHosts, BalanceThreshold) {
  std::map<std::string, HostStats> stats;
  stats["keep.jp"] = {"keep.jp", 2000, 1500, 0, 3};
  stats["drop.jp"] = {"drop.jp", 2000, 100, 0, 3};
  const auto sites = select_balanced_hosts(stats, {1000, 0.3, 10});
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_EQ(sites[0].host, "keep.jp");
  EXPECT_DOUBLE_EQ(sites[0].balance, 0.75);
  EXPECT_DOUBLE_EQ(balance_of(stats["drop.jp"]), 0.05);
}

TEST(SelectHosts, FixtureTopThree) {
  const auto manifest = nlohmann::json::parse(oracle::read_file(oracle::fixture("archive/manifest.json")));
  const auto crit = manifest.at("selection_criteria");
  const auto sites = select_balanced_hosts(scan_archive(read_archive()).hosts,
                                           {crit.at("min_bytes").get<std::uint64_t>(),
                                            crit.at("min_balance").get<double>(), crit.at("limit").get<std::size_t>()});
  std::vector<std::string> hosts;
  for (const auto& s : sites) hosts.push_back(s.host);
  EXPECT_EQ(hosts, manifest.at("selected").get<std::vector<std::string>>());
}

TEST(SelectHosts, SortedAndThresholdedProperty) {
  std::mt19937_64 rng(8);
  for (int round = 0; round < 100; ++round) {
    std::map<std::string, HostStats> stats;
    for (int h = 0; h < 20; ++h) {
      const std::string name = "h" + std::to_string(h) + ".com";
      stats[name] = {name, bounded_uniform(rng, 5000), bounded_uniform(rng, 5000), 0, 1};
    }
    const BalanceCriteria c{1000 + bounded_uniform(rng, 3000), 0.1 * static_cast<double>(1 + bounded_uniform(rng, 8)), 10};
    const auto sites = select_balanced_hosts(stats, c);
    EXPECT_LE(sites.size(), c.limit);
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const HostStats& h = stats.at(sites[i].host);
      EXPECT_GE(std::min(h.bytes_ja, h.bytes_zh), c.min_bytes);
      EXPECT_GE(balance_of(h), c.min_balance);
      if (i > 0) EXPECT_GE(sites[i - 1].bytes_ja + sites[i - 1].bytes_zh, sites[i].bytes_ja + sites[i].bytes_zh);
    }
  }
}

TEST(Candidates, JsonlRoundTrip) {
  CandidateSite s{"example.jp", {"http://www.example.jp/ja/", "http://www.example.jp/zh/"}, SiteSource::Crowd, 0.5, 10, 5};
  const auto back = candidate_from_json(to_jsonl(s));
  EXPECT_EQ(back.host, s.host);
  EXPECT_EQ(back.seed_urls, s.seed_urls);
  EXPECT_EQ(back.source, SiteSource::Crowd);
  EXPECT_EQ(back.bytes_ja, 10u);
}

TEST(UrlPairs, FixtureStatuses) {
  const auto expected = nlohmann::json::parse(oracle::read_file(oracle::fixture("urlpairs/expected.json")));
  const auto fetcher = make_snapshot_fetcher({oracle::fixture("urlpairs/pages")});
  const auto intake = ingest_url_pairs(oracle::fixture("urlpairs/submissions.tsv"), *fetcher);
  const auto statuses = expected.at("statuses").get<std::vector<std::string>>();
  ASSERT_EQ(intake.submissions.size(), statuses.size());
  std::size_t valid = 0, errors = 0;
  for (std::size_t i = 0; i < statuses.size(); ++i) {
    EXPECT_EQ(intake.submissions[i].status_string(), statuses[i]) << "row " << i;
    valid += intake.submissions[i].status == UrlPairSubmission::Status::Valid;
    errors += intake.submissions[i].status == UrlPairSubmission::Status::Error;
  }
  EXPECT_EQ(valid, expected.at("valid").get<std::size_t>());
  EXPECT_EQ(errors, expected.at("errors").get<std::size_t>());
  EXPECT_EQ(valid + errors, statuses.size());
  std::set<std::string> hosts;
  for (const auto& s : intake.sites) EXPECT_TRUE(hosts.insert(s.host).second);
  EXPECT_EQ(intake.sites.size(), valid);
}

TEST(UrlPairs, DuplicateHostAndMalformed) {
  InMemoryFetcher f;
  f.add("http://www.a.jp/ja/", "text/html", "<p>これは日本語のページです。</p>");
  f.add("http://www.a.jp/zh/", "text/html", "<p>这是中文页面。</p>");
  std::vector<UrlPairSubmission> rows = {{"http://www.a.jp/ja/", "http://www.a.jp/zh/", "w1"},
                                         {"http://www.a.jp/ja/", "http://www.a.jp/zh/", "w2"},
                                         {"not a url", "http://www.a.jp/zh/", "w3"},
                                         {"http://www.b.jp/ja/", "http://www.b.jp/zh/", "w4"}};
  const auto intake = validate_url_pairs(rows, f);
  EXPECT_EQ(intake.submissions[0].status_string(), "VALID");
  EXPECT_EQ(intake.submissions[1].status_string(), "ERROR(DUPLICATE_HOST)");
  EXPECT_EQ(intake.submissions[2].status_string(), "ERROR(MALFORMED_URL)");
  EXPECT_EQ(intake.submissions[3].status_string(), "ERROR(UNREACHABLE)");
  EXPECT_EQ(intake.sites.size(), 1u);
}

TEST(UrlPairs, MissingFileIsFatal) {
  InMemoryFetcher f;
  EXPECT_THROW(ingest_url_pairs("/nonexistent/submissions.tsv", f), FatalError);
}
