#include "localmine/corpus.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "localmine/error.hpp"

namespace localmine {

double SiteReport::extraction_rate() const {
  if (n_crawled == 0) return 0.0;
  return std::round(static_cast<double>(n_extracted) / static_cast<double>(n_crawled) * 10000.0) / 10000.0;
}

ReportFormat parse_report_format(std::string_view s) {
  if (s == "tsv") return ReportFormat::Tsv;
  if (s == "json") return ReportFormat::Json;
  if (s == "markdown" || s == "md") return ReportFormat::Markdown;
  throw FatalError("unknown report format: " + std::string(s));
}

std::string_view report_label(SiteSource s) { return s == SiteSource::Archive ? "Common Crawl" : "Crowdsourcing"; }

namespace {

std::string rate3(const SiteReport& r) {
  const double rate = r.n_crawled == 0 ? 0.0 : static_cast<double>(r.n_extracted) / static_cast<double>(r.n_crawled);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", rate);
  return buf;
}

}  // namespace

std::string emit_report(const std::vector<SiteReport>& reports, ReportFormat format) {
  std::ostringstream out;
  switch (format) {
    case ReportFormat::Tsv:
      out << "source\t#URLs\t#errors\t#crawled\t#extracted (rate)\t#sentences\n";
      for (const auto& r : reports) {
        out << report_label(r.source) << '\t' << r.n_urls << '\t' << r.n_errors << '\t' << r.n_crawled << '\t'
            << r.n_extracted << " (" << rate3(r) << ")\t" << r.n_sentences << '\n';
      }
      break;
    case ReportFormat::Markdown:
      out << "| source | #URLs | #errors | #crawled | #extracted (rate) | #sentences |\n";
      out << "|---|---:|---:|---:|---:|---:|\n";
      for (const auto& r : reports) {
        out << "| " << report_label(r.source) << " | " << r.n_urls << " | " << r.n_errors << " | " << r.n_crawled
            << " | " << r.n_extracted << " (" << rate3(r) << ") | " << r.n_sentences << " |\n";
      }
      break;
    case ReportFormat::Json: {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (const auto& r : reports) {
        nlohmann::ordered_json j;
        j["source"] = std::string(to_string(r.source));
        j["label"] = std::string(report_label(r.source));
        j["n_urls"] = r.n_urls;
        j["n_errors"] = r.n_errors;
        j["n_crawled"] = r.n_crawled;
        j["n_extracted"] = r.n_extracted;
        j["extraction_rate"] = r.extraction_rate();
        j["n_sentences"] = r.n_sentences;
        rows.push_back(std::move(j));
      }
      out << rows.dump(2) << '\n';
      break;
    }
  }
  return out.str();
}

std::vector<SiteReport> reports_from_json(const nlohmann::json& j) {
  std::vector<SiteReport> out;
  try {
    for (const auto& row : j) {
      SiteReport r;
      r.source = parse_site_source(row.at("source").get<std::string>());
      r.n_urls = row.at("n_urls").get<std::uint64_t>();
      r.n_errors = row.at("n_errors").get<std::uint64_t>();
      r.n_crawled = row.at("n_crawled").get<std::uint64_t>();
      r.n_extracted = row.at("n_extracted").get<std::uint64_t>();
      r.n_sentences = row.at("n_sentences").get<std::uint64_t>();
      out.push_back(r);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad report JSON: ") + e.what());
  }
  return out;
}

}  // namespace localmine
