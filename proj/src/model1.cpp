#include "localmine/model1.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "localmine/error.hpp"

namespace localmine {

double TranslationTable::prob(const std::string& src, const std::string& trg) const {
  const auto row = rows_.find(src);
  if (row == rows_.end()) return 0.0;
  const auto cell = row->second.find(trg);
  return cell == row->second.end() ? 0.0 : cell->second;
}

void TranslationTable::write_tsv(std::ostream& out) const {
  char buf[32];
  for (const auto& [src, row] : rows_) {
    for (const auto& [trg, p] : row) {
      std::snprintf(buf, sizeof buf, "%.6f", p);
      out << src << '\t' << trg << '\t' << buf << '\n';
    }
  }
}

TranslationTable TranslationTable::read_tsv(std::istream& in, Direction dir) {
  TranslationTable t;
  t.direction = dir;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto a = line.find('\t');
    const auto b = a == std::string::npos ? a : line.find('\t', a + 1);
    if (b == std::string::npos) throw Error("translation table line " + std::to_string(lineno) + ": expected 3 columns");
    double p = 0.0;
    try {
      std::size_t used = 0;
      p = std::stod(line.substr(b + 1), &used);
    } catch (const std::exception&) {
      throw Error("translation table line " + std::to_string(lineno) + ": bad probability");
    }
    if (!(p >= 0.0 && p <= 1.0)) throw Error("translation table line " + std::to_string(lineno) + ": probability out of range");
    t.set(line.substr(0, a), line.substr(a + 1, b - a - 1), p);
  }
  return t;
}

namespace {

struct Interned {
  std::vector<std::string> src_names{TranslationTable::kNull};
  std::vector<std::string> trg_names;
  std::vector<std::pair<std::vector<int>, std::vector<int>>> pairs;  // src ids include NULL (0) first
};

Interned intern(const std::vector<TokenPair>& corpus) {
  Interned in;
  std::unordered_map<std::string, int> src_ids{{TranslationTable::kNull, 0}};
  std::unordered_map<std::string, int> trg_ids;
  for (const auto& [src, trg] : corpus) {
    std::vector<int> s{0};
    std::vector<int> t;
    for (const auto& w : src) {
      const auto [it, fresh] = src_ids.emplace(w, static_cast<int>(in.src_names.size()));
      if (fresh) in.src_names.push_back(w);
      s.push_back(it->second);
    }
    for (const auto& w : trg) {
      const auto [it, fresh] = trg_ids.emplace(w, static_cast<int>(in.trg_names.size()));
      if (fresh) in.trg_names.push_back(w);
      t.push_back(it->second);
    }
    in.pairs.emplace_back(std::move(s), std::move(t));
  }
  return in;
}

using Rows = std::vector<std::unordered_map<int, double>>;

TranslationTable to_table(const Interned& in, const Rows& t, Direction dir) {
  TranslationTable table;
  table.direction = dir;
  for (std::size_t e = 0; e < t.size(); ++e) {
    for (const auto& [f, p] : t[e]) table.set(in.src_names[e], in.trg_names[static_cast<std::size_t>(f)], p);
  }
  return table;
}

double log_likelihood(const Interned& in, const Rows& t) {
  double ll = 0.0;
  for (const auto& [s, f] : in.pairs) {
    for (int fj : f) {
      double sum = 0.0;
      for (int e : s) sum += t[static_cast<std::size_t>(e)].at(fj);
      ll += std::log(sum / static_cast<double>(s.size()));
    }
  }
  return ll;
}

}  // namespace

TranslationTable train_model1(const std::vector<TokenPair>& corpus, int iterations, const Model1Callback& on_iteration,
                              Direction dir) {
  if (corpus.empty()) throw Error("train_model1: empty corpus");
  if (iterations < 1) throw Error("train_model1: iterations must be at least 1");
  const Interned in = intern(corpus);

  Rows t(in.src_names.size());
  for (const auto& [s, f] : in.pairs) {
    for (int e : s) {
      for (int fj : f) t[static_cast<std::size_t>(e)][fj] = 0.0;
    }
  }
  for (auto& row : t) {
    for (auto& [f, p] : row) p = 1.0 / static_cast<double>(row.size());
  }

  Rows counts(t.size());
  for (int iter = 1; iter <= iterations; ++iter) {
    for (std::size_t e = 0; e < t.size(); ++e) {
      counts[e] = t[e];
      for (auto& [f, c] : counts[e]) c = 0.0;
    }
    for (const auto& [s, f] : in.pairs) {
      for (int fj : f) {
        double denom = 0.0;
        for (int e : s) denom += t[static_cast<std::size_t>(e)].at(fj);
        for (int e : s) counts[static_cast<std::size_t>(e)][fj] += t[static_cast<std::size_t>(e)].at(fj) / denom;
      }
    }
    for (std::size_t e = 0; e < t.size(); ++e) {
      double total = 0.0;
      for (const auto& [f, c] : counts[e]) total += c;
      if (total <= 0.0) continue;
      for (auto& [f, p] : t[e]) p = counts[e].at(f) / total;
    }
    if (on_iteration) on_iteration(iter, log_likelihood(in, t), to_table(in, t, dir));
  }
  return to_table(in, t, dir);
}

double model1_log_likelihood(const TranslationTable& table, const std::vector<TokenPair>& corpus) {
  double ll = 0.0;
  for (const auto& [src, trg] : corpus) {
    for (const auto& f : trg) {
      double sum = table.prob(TranslationTable::kNull, f);
      for (const auto& e : src) sum += table.prob(e, f);
      if (sum <= 0.0) return -std::numeric_limits<double>::infinity();
      ll += std::log(sum / static_cast<double>(src.size() + 1));
    }
  }
  return ll;
}

}  // namespace localmine
