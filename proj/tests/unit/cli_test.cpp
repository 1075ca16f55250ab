#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + LOCALMINE_CLI + "\" -q " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(cli(""), 1);
  EXPECT_EQ(cli("frobnicate"), 1);
  EXPECT_EQ(cli("run"), 1);
  EXPECT_EQ(cli("--config /nonexistent.ini run"), 1);
  EXPECT_EQ(cli("--help"), 0);
}

TEST(Cli, UnknownConfigKeyIsFatal) {
  const fs::path p = fs::temp_directory_path() / "localmine_cli_bad.ini";
  std::ofstream(p) << "[pipeline]\nspeed = 11\n";
  EXPECT_EQ(cli("--config " + p.string() + " run"), 1);
  fs::remove(p);
}

TEST(Cli, ReportRendersJson) {
  const fs::path dir = fs::temp_directory_path() / "localmine_cli_report";
  fs::create_directories(dir);
  std::ofstream(dir / "r.json")
      << R"([{"source":"ARCHIVE","n_urls":40000,"n_errors":19878,"n_crawled":20122,"n_extracted":5483,"n_sentences":2786467}])";
  const std::string cmd = std::string("\"") + LOCALMINE_CLI + "\" report --in " + (dir / "r.json").string() +
                          " --format tsv > " + (dir / "out.tsv").string();
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_NE(oracle::read_file((dir / "out.tsv").string()).find("Common Crawl\t40000\t19878\t20122\t5483 (0.272)\t2786467"),
            std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, StagewiseMatchesSnapshotSite) {
  const fs::path dir = fs::temp_directory_path() / ("localmine_cli_stages_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  const std::string cfg = "--config " + oracle::fixture("e2e/e2e.ini") + " --snapshot-dir " + oracle::fixture("e2e");
  ASSERT_EQ(cli(cfg + " validate-urls --submissions " + oracle::fixture("e2e/submissions.tsv") + " --out-dir " + dir.string()), 0);
  ASSERT_EQ(cli(cfg + " crawl --candidates " + (dir / "candidates.jsonl").string() + " --out-dir " + dir.string()), 0);
  ASSERT_EQ(cli(cfg + " mine --pages " + (dir / "nicchu-shoji.co.jp/pages").string() + " --out-dir " + (dir / "mined").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "mined/raw_pairs.jsonl"));
  EXPECT_TRUE(fs::exists(dir / "mined/ladder.tsv"));
  ASSERT_EQ(cli(cfg + " dedup --in " + (dir / "mined/raw_pairs.jsonl").string() + " --out " + (dir / "d.jsonl").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "d.jsonl"));
  fs::remove_all(dir);
}
