#include "localmine/sent_align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "localmine/error.hpp"

namespace localmine {

std::size_t src_count(BeadKind k) {
  switch (k) {
    case BeadKind::Sub:
      return 0;
    case BeadKind::Del:
    case BeadKind::One:
    case BeadKind::Expand:
      return 1;
    case BeadKind::Contract:
    case BeadKind::Merge:
      return 2;
  }
  return 0;
}

std::size_t trg_count(BeadKind k) {
  switch (k) {
    case BeadKind::Del:
      return 0;
    case BeadKind::Sub:
    case BeadKind::One:
    case BeadKind::Contract:
      return 1;
    case BeadKind::Expand:
    case BeadKind::Merge:
      return 2;
  }
  return 0;
}

std::string_view to_string(BeadKind k) {
  static constexpr std::string_view names[] = {"0-1", "1-0", "1-1", "1-2", "2-1", "2-2"};
  return names[static_cast<std::size_t>(k)];
}

BeadKind parse_bead_kind(std::string_view s) {
  for (BeadKind k : kAllBeadKinds) {
    if (to_string(k) == s) return k;
  }
  throw Error("unknown bead kind: " + std::string(s));
}

BeadKind transpose(BeadKind k) {
  switch (k) {
    case BeadKind::Sub:
      return BeadKind::Del;
    case BeadKind::Del:
      return BeadKind::Sub;
    case BeadKind::Expand:
      return BeadKind::Contract;
    case BeadKind::Contract:
      return BeadKind::Expand;
    default:
      return k;
  }
}

LengthModel LengthModel::defaults() {
  LengthModel m;
  std::array<double, 6> raw{};
  raw[static_cast<std::size_t>(BeadKind::One)] = 0.89;
  raw[static_cast<std::size_t>(BeadKind::Del)] = 0.0099;
  raw[static_cast<std::size_t>(BeadKind::Sub)] = 0.0099;
  raw[static_cast<std::size_t>(BeadKind::Expand)] = 0.0445;
  raw[static_cast<std::size_t>(BeadKind::Contract)] = 0.0445;
  raw[static_cast<std::size_t>(BeadKind::Merge)] = 0.011;
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
  for (std::size_t k = 0; k < raw.size(); ++k) m.priors[k] = raw[k] / total;
  return m;
}

void LengthModel::validate() const {
  if (!(c > 0.0)) throw FatalError("length model c must be positive");
  if (!(s2 > 0.0)) throw FatalError("length model s2 must be positive");
  double total = 0.0;
  for (double p : priors) {
    if (!(p > 0.0)) throw FatalError("bead priors must be positive");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw FatalError("bead priors must sum to 1");
}

double length_cost(std::size_t l_src, std::size_t l_trg, const LengthModel& model) {
  const double ls = static_cast<double>(l_src);
  const double lt = static_cast<double>(l_trg);
  const double delta = (lt - model.c * ls) / std::sqrt(std::max(ls, 1.0) * model.s2);
  const double tail = std::erfc(std::abs(delta) / std::sqrt(2.0));  // 2(1 - Phi(|delta|))
  if (!(tail > 0.0)) return kMaxLengthCost;
  const double cost = -std::log(tail);
  if (!(cost > 0.0)) return 0.0;
  return std::min(cost, kMaxLengthCost);
}

namespace {

double compose_cost(BeadKind kind, std::size_t l_src, std::size_t l_trg, std::size_t matched, std::size_t n_src,
                    std::size_t n_trg, const LengthModel& model, double lambda) {
  double dict = 0.0;
  if (kind != BeadKind::Sub && kind != BeadKind::Del && n_src + n_trg > 0) {
    dict = 2.0 * static_cast<double>(matched) / static_cast<double>(n_src + n_trg);
  }
  const double cost = length_cost(l_src, l_trg, model) - std::log(model.prior(kind)) - lambda * dict;
  return cost > 0.0 ? cost : 0.0;
}

}  // namespace

double bead_cost(BeadKind kind, std::span<const Sentence> src, std::span<const Sentence> trg, const Lexicon& lex,
                 const LengthModel& model, double lambda, Direction dir) {
  if (src.size() != src_count(kind) || trg.size() != trg_count(kind))
    throw Error("sentence spans do not match bead kind " + std::string(to_string(kind)));
  std::size_t l_src = 0;
  std::size_t l_trg = 0;
  std::vector<std::string> src_tokens;
  std::vector<std::string> trg_tokens;
  for (const auto& s : src) {
    l_src += s.char_len;
    src_tokens.insert(src_tokens.end(), s.tokens.begin(), s.tokens.end());
  }
  for (const auto& s : trg) {
    l_trg += s.char_len;
    trg_tokens.insert(trg_tokens.end(), s.tokens.begin(), s.tokens.end());
  }
  std::size_t matched = 0;
  if (kind != BeadKind::Sub && kind != BeadKind::Del) matched = greedy_match_count(src_tokens, trg_tokens, lex, dir);
  return compose_cost(kind, l_src, l_trg, matched, src_tokens.size(), trg_tokens.size(), model, lambda);
}

namespace {

// Interned view of one document pair so bead costs avoid string hashing.
class BeadScorer {
 public:
  BeadScorer(const std::vector<Sentence>& src, const std::vector<Sentence>& trg, const Lexicon& lex, Direction dir)
      : src_(src), trg_(trg) {
    std::unordered_map<std::string, int> ids;
    trg_ids_.resize(trg.size());
    for (std::size_t j = 0; j < trg.size(); ++j) {
      for (const auto& t : trg[j].tokens) {
        const auto [it, fresh] = ids.emplace(t, static_cast<int>(ids.size()));
        trg_ids_[j].push_back(it->second);
      }
    }
    counts_.assign(ids.size(), 0);
    src_trans_.resize(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
      for (const auto& s : src[i].tokens) {
        std::vector<int> cands;
        for (const auto& t : lex.translations(s, dir)) {
          if (const auto it = ids.find(t); it != ids.end()) cands.push_back(it->second);
        }
        src_trans_[i].push_back(std::move(cands));
      }
    }
  }

  // Bead of `kind` ending just before source i and target j.
  double cost(BeadKind kind, std::size_t i, std::size_t j, const LengthModel& model, double lambda) {
    const std::size_t a = src_count(kind);
    const std::size_t b = trg_count(kind);
    std::size_t l_src = 0, l_trg = 0, n_src = 0, n_trg = 0;
    for (std::size_t k = i - a; k < i; ++k) {
      l_src += src_[k].char_len;
      n_src += src_[k].tokens.size();
    }
    for (std::size_t k = j - b; k < j; ++k) {
      l_trg += trg_[k].char_len;
      n_trg += trg_[k].tokens.size();
    }
    std::size_t matched = 0;
    if (a > 0 && b > 0) {
      for (std::size_t k = j - b; k < j; ++k) {
        for (int id : trg_ids_[k]) ++counts_[static_cast<std::size_t>(id)];
      }
      for (std::size_t k = i - a; k < i; ++k) {
        for (const auto& cands : src_trans_[k]) {
          for (int id : cands) {
            if (counts_[static_cast<std::size_t>(id)] > 0) {
              --counts_[static_cast<std::size_t>(id)];
              ++matched;
              break;
            }
          }
        }
      }
      for (std::size_t k = j - b; k < j; ++k) {
        for (int id : trg_ids_[k]) counts_[static_cast<std::size_t>(id)] = 0;
      }
    }
    return compose_cost(kind, l_src, l_trg, matched, n_src, n_trg, model, lambda);
  }

 private:
  const std::vector<Sentence>& src_;
  const std::vector<Sentence>& trg_;
  std::vector<std::vector<int>> trg_ids_;
  std::vector<std::vector<std::vector<int>>> src_trans_;
  std::vector<int> counts_;
};

constexpr std::array<BeadKind, 6> kPreference = {BeadKind::One,   BeadKind::Contract, BeadKind::Expand,
                                                 BeadKind::Merge, BeadKind::Del,      BeadKind::Sub};

AlignmentLadder run_dp(const std::vector<Sentence>& src, const std::vector<Sentence>& trg, BeadScorer& scorer,
                       const AlignConfig& cfg, const LengthModel& model) {
  const std::size_t n = src.size();
  const std::size_t m = trg.size();
  const std::size_t width = m + 1;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> best((n + 1) * width, inf);
  std::vector<double> step((n + 1) * width, 0.0);
  std::vector<std::uint8_t> back((n + 1) * width, 0);
  best[0] = 0.0;

  const bool banded = cfg.band && n > 0 && m > 0;
  const double half_width = std::max(cfg.band_min, cfg.band_frac * static_cast<double>(m));
  auto in_band = [&](std::size_t i, std::size_t j) {
    if (!banded) return true;
    const double center = static_cast<double>(i) * static_cast<double>(m) / static_cast<double>(n);
    return std::abs(center - static_cast<double>(j)) <= half_width;
  };

  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      if ((i == 0 && j == 0) || !in_band(i, j)) continue;
      double cell = inf;
      double cell_step = 0.0;
      BeadKind choice = BeadKind::One;
      for (BeadKind k : kPreference) {
        const std::size_t a = src_count(k);
        const std::size_t b = trg_count(k);
        if (i < a || j < b) continue;
        const double prev = best[(i - a) * width + (j - b)];
        if (prev == inf) continue;
        const double c = scorer.cost(k, i, j, model, cfg.lambda);
        const double total = prev + c;
        if (total < cell) {
          cell = total;
          cell_step = c;
          choice = k;
        }
      }
      best[i * width + j] = cell;
      step[i * width + j] = cell_step;
      back[i * width + j] = static_cast<std::uint8_t>(choice);
    }
  }

  AlignmentLadder ladder;
  if (best[n * width + m] == inf) throw Error("sentence alignment: no tiling within the band");
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    const auto kind = static_cast<BeadKind>(back[i * width + j]);
    const std::size_t a = src_count(kind);
    const std::size_t b = trg_count(kind);
    ladder.beads.push_back({kind, {i - a, a}, {j - b, b}, step[i * width + j]});
    i -= a;
    j -= b;
  }
  std::reverse(ladder.beads.begin(), ladder.beads.end());
  double total = 0.0;
  for (const auto& bead : ladder.beads) total += bead.cost;
  ladder.total_cost = total;
  return ladder;
}

}  // namespace

AlignmentLadder align_sentences(const std::vector<Sentence>& src, const std::vector<Sentence>& trg, const Lexicon& lex,
                                const AlignConfig& cfg) {
  cfg.model.validate();
  if (src.empty() && trg.empty()) return {};
  BeadScorer scorer(src, trg, lex, cfg.dir);
  AlignmentLadder ladder = run_dp(src, trg, scorer, cfg, cfg.model);
  if (!cfg.reestimate) return ladder;

  double sum_src = 0.0;
  double sum_trg = 0.0;
  std::size_t ones = 0;
  for (const auto& b : ladder.beads) {
    if (b.kind != BeadKind::One) continue;
    sum_src += static_cast<double>(src[b.src.start].char_len);
    sum_trg += static_cast<double>(trg[b.trg.start].char_len);
    ++ones;
  }
  if (ones < 3 || sum_src <= 0.0 || sum_trg <= 0.0) return ladder;
  LengthModel model = cfg.model;
  model.c = sum_trg / sum_src;
  double var = 0.0;
  for (const auto& b : ladder.beads) {
    if (b.kind != BeadKind::One) continue;
    const double ls = std::max(1.0, static_cast<double>(src[b.src.start].char_len));
    const double d = static_cast<double>(trg[b.trg.start].char_len) - model.c * ls;
    var += d * d / ls;
  }
  model.s2 = std::max(var / static_cast<double>(ones), 0.5);
  return run_dp(src, trg, scorer, cfg, model);
}

std::vector<AlignedPair> extract_pairs(const AlignmentLadder& ladder, const std::vector<Sentence>& src,
                                       const std::vector<Sentence>& trg, double max_cost) {
  std::vector<AlignedPair> out;
  for (const auto& b : ladder.beads) {
    if (b.src.len == 0 || b.trg.len == 0 || b.cost > max_cost) continue;
    AlignedPair p;
    for (std::size_t k = 0; k < b.src.len; ++k) p.src += src.at(b.src.start + k).text;
    for (std::size_t k = 0; k < b.trg.len; ++k) p.trg += trg.at(b.trg.start + k).text;
    p.cost = b.cost;
    p.bead = b;
    out.push_back(std::move(p));
  }
  return out;
}

void write_ladder_tsv(std::ostream& out, const AlignmentLadder& ladder) {
  char cost[32];
  for (const auto& b : ladder.beads) {
    std::snprintf(cost, sizeof cost, "%.6f", b.cost);
    out << b.src.start << '\t' << b.src.len << '\t' << b.trg.start << '\t' << b.trg.len << '\t' << to_string(b.kind)
        << '\t' << cost << '\n';
  }
}

}  // namespace localmine
