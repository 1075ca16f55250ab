#include "localmine/corpus.hpp"

#include <cmath>
#include <fstream>

#include "localmine/error.hpp"
#include "localmine/hash.hpp"
#include "localmine/text.hpp"

namespace localmine {

namespace {

double round4(double x) { return std::round(x * 10000.0) / 10000.0; }

}  // namespace

nlohmann::ordered_json to_json(const CorpusRecord& r) {
  nlohmann::ordered_json j;
  j["ja"] = r.ja;
  j["zh"] = r.zh;
  j["src_url_ja"] = r.src_url_ja;
  j["src_url_zh"] = r.src_url_zh;
  j["doc_score"] = round4(r.doc_score);
  j["bead_cost"] = round4(r.bead_cost);
  j["filter_score"] = round4(r.filter_score);
  if (r.embed_sim) {
    j["embed_sim"] = round4(*r.embed_sim);
  } else {
    j["embed_sim"] = nullptr;
  }
  return j;
}

CorpusRecord record_from_json(const nlohmann::json& j) {
  try {
    CorpusRecord r;
    r.ja = j.at("ja").get<std::string>();
    r.zh = j.at("zh").get<std::string>();
    r.src_url_ja = j.value("src_url_ja", "");
    r.src_url_zh = j.value("src_url_zh", "");
    r.doc_score = j.value("doc_score", 0.0);
    r.bead_cost = j.value("bead_cost", 0.0);
    r.filter_score = j.value("filter_score", 0.0);
    if (j.contains("embed_sim") && !j.at("embed_sim").is_null()) r.embed_sim = j.at("embed_sim").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad corpus record: ") + e.what());
  }
}

void write_records_jsonl(const std::string& path, const std::vector<CorpusRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FatalError("cannot write " + path);
  for (const auto& r : records) out << to_json(r).dump() << '\n';
  if (!out) throw FatalError("cannot write " + path);
}

std::vector<CorpusRecord> read_records_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FatalError("cannot open " + path);
  std::vector<CorpusRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception&) {
      throw Error(path + ":" + std::to_string(lineno) + ": invalid JSON");
    }
  }
  return out;
}

void write_records_tsv(const std::string& path, const std::vector<CorpusRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FatalError("cannot write " + path);
  for (const auto& r : records) out << r.ja << '\t' << r.zh << '\n';
  if (!out) throw FatalError("cannot write " + path);
}

bool Deduplicator::admit(const CorpusRecord& r) {
  const std::string ja = normalize_text(r.ja);
  const std::string zh = normalize_text(r.zh);
  if (ja == zh) return false;
  std::string key = ja;
  key += '\t';
  key += zh;
  if (mode_ == DedupMode::Exact) return exact_.insert(std::move(key)).second;
  return hashed_.insert(fnv1a64(key)).second;
}

std::vector<CorpusRecord> dedupe(const std::vector<CorpusRecord>& records, DedupMode mode) {
  Deduplicator d(mode);
  std::vector<CorpusRecord> out;
  for (const auto& r : records) {
    if (d.admit(r)) out.push_back(r);
  }
  return out;
}

}  // namespace localmine
