#include "localmine/features.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "localmine/error.hpp"
#include "localmine/hash.hpp"
#include "localmine/utf8.hpp"

namespace localmine {

namespace {

double min_max_ratio(double a, double b) {
  const double hi = std::max(a, b);
  return hi <= 0.0 ? 0.0 : std::min(a, b) / hi;
}

double avg_max_prob(const std::vector<std::string>& src, const std::vector<std::string>& trg,
                    const TranslationTable& table) {
  if (src.empty()) return 0.0;
  const std::unordered_set<std::string> present(trg.begin(), trg.end());
  double total = 0.0;
  for (const auto& s : src) {
    const auto row = table.rows().find(s);
    if (row == table.rows().end()) continue;
    double best = 0.0;
    for (const auto& [t, p] : row->second) {
      if (p > best && present.count(t)) best = p;
    }
    total += best;
  }
  return total / static_cast<double>(src.size());
}

std::vector<std::string> digit_runs(std::string_view s) {
  std::vector<std::string> runs;
  std::string cur;
  for (char c : s) {
    if (c >= '0' && c <= '9') {
      cur += c;
    } else if (!cur.empty()) {
      runs.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) runs.push_back(std::move(cur));
  std::sort(runs.begin(), runs.end());
  return runs;
}

bool is_counted_punct(char32_t c) {
  switch (c) {
    case U'。': case U'．': case U'.': case U'！': case U'!': case U'？': case U'?':
    case U'「': case U'」': case U'『': case U'』': case U'（': case U'）': case U'(': case U')':
    case U'【': case U'】': case U'[': case U']': case U'《': case U'》': case U'〈': case U'〉':
    case U'“': case U'”': case U'"':
      return true;
    default:
      return false;
  }
}

}  // namespace

double digit_runs_match(std::string_view a, std::string_view b) { return digit_runs(a) == digit_runs(b) ? 1.0 : 0.0; }

std::size_t punctuation_count(std::string_view s) {
  std::size_t n = 0;
  for (char32_t c : utf8::decode(s)) n += is_counted_punct(c) ? 1 : 0;
  return n;
}

FeatureVector extract_features(const Sentence& ja, const Sentence& zh, const FeatureModels& m) {
  if (!m.t_j2z || !m.t_z2j || !m.lm_ja || !m.lm_zh || !m.lex) throw Error("extract_features: models not set");
  FeatureVector fv;
  fv[0] = static_cast<double>(ja.char_len);
  fv[1] = static_cast<double>(zh.char_len);
  fv[2] = min_max_ratio(fv[0], fv[1]);
  fv[3] = min_max_ratio(static_cast<double>(ja.tokens.size()), static_cast<double>(zh.tokens.size()));
  fv[4] = coverage(ja.tokens, zh.tokens, *m.lex, Direction::JaToZh);
  fv[5] = coverage(zh.tokens, ja.tokens, *m.lex, Direction::ZhToJa);
  fv[6] = avg_max_prob(ja.tokens, zh.tokens, *m.t_j2z);
  fv[7] = avg_max_prob(zh.tokens, ja.tokens, *m.t_z2j);
  fv[8] = ja.text.empty() ? std::log(1e-12) : lm_score(*m.lm_ja, ja.text);
  fv[9] = zh.text.empty() ? std::log(1e-12) : lm_score(*m.lm_zh, zh.text);
  fv[10] = digit_runs_match(ja.text, zh.text);
  const double pj = static_cast<double>(punctuation_count(ja.text));
  const double pz = static_cast<double>(punctuation_count(zh.text));
  fv[11] = std::abs(pj - pz) / std::max(pj + pz, 1.0);
  return fv;
}

namespace {

std::string truncated(const std::string& s) {
  const auto cuts = utf8::boundaries(s);
  const std::size_t chars = cuts.size() - 1;
  return s.substr(0, cuts[chars * 2 / 5]);
}

}  // namespace

std::vector<LabeledPair> synthesize_negatives(const std::vector<TextPair>& positives, std::uint64_t seed,
                                              const Tokenizer& tokenize_zh) {
  if (positives.size() < 10) throw Error("synthesize_negatives: need at least 10 positives");
  std::mt19937_64 rng(seed);
  std::vector<LabeledPair> out;
  out.reserve(positives.size() * 2);
  const std::size_t n = positives.size();
  for (std::size_t i = 0; i < n; ++i) {
    const TextPair& p = positives[i];
    const std::uint64_t first = bounded_uniform(rng, 3);
    std::string neg;
    bool found = false;
    for (std::uint64_t attempt = 0; attempt < 3 && !found; ++attempt) {
      switch ((first + attempt) % 3) {
        case 0: {
          const std::uint64_t r = bounded_uniform(rng, n - 1);
          for (std::size_t step = 0; step + 1 < n; ++step) {
            const std::size_t k = (i + 1 + (r + step) % (n - 1)) % n;
            if (positives[k].zh != p.zh) {
              neg = positives[k].zh;
              found = true;
              break;
            }
          }
          break;
        }
        case 1: {
          std::vector<std::string> toks = tokenize_zh(p.zh);
          if (toks.size() < 2) break;
          seeded_shuffle(toks.begin(), toks.end(), rng);
          std::string joined;
          for (const auto& t : toks) joined += t;
          if (joined == p.zh) {
            std::rotate(toks.begin(), toks.begin() + 1, toks.end());
            joined.clear();
            for (const auto& t : toks) joined += t;
          }
          if (joined != p.zh) {
            neg = std::move(joined);
            found = true;
          }
          break;
        }
        default: {
          std::string cut = truncated(p.zh);
          if (cut != p.zh) {
            neg = std::move(cut);
            found = true;
          }
          break;
        }
      }
    }
    if (!found) throw Error("synthesize_negatives: cannot build a negative for positive " + std::to_string(i));
    out.push_back({p.ja, p.zh, 1});
    out.push_back({p.ja, std::move(neg), 0});
  }
  return out;
}

}  // namespace localmine
