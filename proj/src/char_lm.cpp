#include "localmine/char_lm.hpp"

#include <algorithm>
#include <cmath>

#include "localmine/error.hpp"
#include "localmine/utf8.hpp"

namespace localmine {

CharLM::CharLM(int order, double k) : order_(order), k_(k) {
  if (order < 2 || order > 7) throw Error("char LM order must be in [2, 7]");
  if (!(k > 0.0)) throw Error("char LM smoothing constant must be positive");
  vocab_.push_back(kEos);
}

void CharLM::add_sentence(std::u32string_view chars) {
  std::u32string seq(static_cast<std::size_t>(order_ - 1), kBos);
  seq.append(chars);
  seq.push_back(kEos);
  for (std::size_t i = static_cast<std::size_t>(order_ - 1); i < seq.size(); ++i) {
    const char32_t w = seq[i];
    if (w != kEos) {
      const auto it = std::lower_bound(vocab_.begin(), vocab_.end(), w);
      if (it == vocab_.end() || *it != w) vocab_.insert(it, w);
    }
    for (int len = 0; len < order_; ++len) {
      auto& ctx = contexts_[seq.substr(i - static_cast<std::size_t>(len), static_cast<std::size_t>(len))];
      ++ctx.total;
      ++ctx.next[w];
    }
  }
}

double CharLM::prob(char32_t w, std::u32string_view history) const {
  if (!std::binary_search(vocab_.begin(), vocab_.end(), w)) w = kUnk;
  const double outcomes = static_cast<double>(vocab_.size() + 1);
  std::u32string_view h = history;
  const auto max_len = static_cast<std::size_t>(order_ - 1);
  if (h.size() > max_len) h = h.substr(h.size() - max_len);
  while (true) {
    const auto it = contexts_.find(h);
    if (it != contexts_.end() && it->second.total > 0) {
      const auto c = it->second.next.find(w);
      const double cw = c == it->second.next.end() ? 0.0 : static_cast<double>(c->second);
      return (cw + k_) / (static_cast<double>(it->second.total) + k_ * outcomes);
    }
    if (h.empty()) return 1.0 / outcomes;
    h.remove_prefix(1);
  }
}

CharLM CharLM::from_counts(int order, double k, std::vector<char32_t> vocab, ContextMap ctx) {
  CharLM lm(order, k);
  std::sort(vocab.begin(), vocab.end());
  vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
  if (!std::binary_search(vocab.begin(), vocab.end(), kEos)) throw Error("char LM vocabulary lacks the end symbol");
  lm.vocab_ = std::move(vocab);
  lm.contexts_ = std::move(ctx);
  return lm;
}

CharLM train_char_lm(const std::vector<std::string>& corpus, int n, double k) {
  if (corpus.empty()) throw Error("train_char_lm: empty corpus");
  CharLM lm(n, k);
  for (const auto& s : corpus) lm.add_sentence(utf8::decode(s));
  return lm;
}

double lm_score(const CharLM& lm, std::string_view text) {
  if (text.empty()) throw Error("lm_score: empty text");
  const std::u32string chars = utf8::decode(text);
  std::u32string hist(static_cast<std::size_t>(lm.order() - 1), CharLM::kBos);
  double total = 0.0;
  for (char32_t c : chars) {
    total += std::log(lm.prob(c, hist));
    hist.erase(0, 1);
    hist.push_back(c);
  }
  total += std::log(lm.prob(CharLM::kEos, hist));
  return total / static_cast<double>(chars.size() + 1);
}

}  // namespace localmine
