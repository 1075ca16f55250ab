#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "localmine/error.hpp"
#include "localmine/hash.hpp"
#include "localmine/sent_align.hpp"
#include "oracles.hpp"

using namespace localmine;

namespace {

Sentence sentence(const std::vector<std::string>& tokens) {
  std::string text;
  for (const auto& t : tokens) text += t;
  Sentence s = Sentence::from_text(text);
  s.tokens = tokens;
  return s;
}

Sentence plain(std::size_t chars) {
  std::string text;
  for (std::size_t i = 0; i < chars; ++i) text += "字";
  return Sentence::from_text(text);
}

struct Mirror {
  Lexicon lex;
  std::vector<std::string> ja, zh;
  Mirror() {
    for (int i = 0; i < 200; ++i) {
      ja.push_back("ja" + std::to_string(i) + "語");
      zh.push_back("zh" + std::to_string(i) + "语");
      lex.add(ja.back(), zh.back());
    }
  }
  std::pair<Sentence, Sentence> pair(std::mt19937_64& rng, std::size_t n) const {
    std::vector<std::string> a, b;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t w = bounded_uniform(rng, ja.size());
      a.push_back(ja[w]);
      b.push_back(zh[w]);
    }
    return {sentence(a), sentence(b)};
  }
};

void expect_tiling(const AlignmentLadder& ladder, std::size_t n, std::size_t m) {
  std::size_t si = 0, ti = 0;
  double sum = 0.0;
  for (const auto& b : ladder.beads) {
    EXPECT_EQ(b.src.start, si);
    EXPECT_EQ(b.trg.start, ti);
    EXPECT_EQ(b.src.len, src_count(b.kind));
    EXPECT_EQ(b.trg.len, trg_count(b.kind));
    si += b.src.len;
    ti += b.trg.len;
    sum += b.cost;
  }
  EXPECT_EQ(si, n);
  EXPECT_EQ(ti, m);
  EXPECT_NEAR(sum, ladder.total_cost, 1e-9);
}

}  // namespace

TEST(LengthCost, SymmetricCaseIsZero) {
  const auto model = LengthModel::defaults();
  EXPECT_NEAR(length_cost(100, 100, model), 0.0, 1e-12);
}

TEST(LengthCost, MonotoneInDelta) {
  const auto model = LengthModel::defaults();
  EXPECT_GT(length_cost(100, 180, model), length_cost(100, 100, model));
  EXPECT_GT(length_cost(100, 180, model), length_cost(100, 150, model));
}

TEST(LengthCost, MatchesNormalCdfOracle) {
  LengthModel model = LengthModel::defaults();
  model.c = 1.0;
  model.s2 = 6.8;
  EXPECT_NEAR(length_cost(50, 80, model), oracle::gale_church_cost(50, 80, 1.0, 6.8), 1e-9);
  EXPECT_NEAR(length_cost(50, 80, model), 2.2658513328565788, 1e-12);
  EXPECT_NEAR(30.0 / std::sqrt(340.0), 1.6269784336399213, 1e-15);
  model.c = 1.3;
  model.s2 = 4.0;
  for (std::size_t ls : {1u, 7u, 33u})
    for (std::size_t lt : {0u, 5u, 40u}) EXPECT_NEAR(length_cost(ls, lt, model), std::min(oracle::gale_church_cost(double(ls), double(lt), 1.3, 4.0), kMaxLengthCost), 1e-8);
}

TEST(LengthCost, CappedAndFinite) {
  const auto model = LengthModel::defaults();
  EXPECT_DOUBLE_EQ(length_cost(1, 5000, model), kMaxLengthCost);
  EXPECT_DOUBLE_EQ(length_cost(0, 0, model), 0.0);
}

TEST(LengthModel, InvalidPriorsFatal) {
  LengthModel m = LengthModel::defaults();
  m.priors[0] = 0.5;
  EXPECT_THROW(m.validate(), FatalError);
  LengthModel c = LengthModel::defaults();
  c.c = 0.0;
  EXPECT_THROW(c.validate(), FatalError);
}

TEST(BeadCost, OneBeadPerfectMirrorClampsAtZero) {
  Mirror mi;
  std::mt19937_64 rng(1);
  auto [a, b] = mi.pair(rng, 5);
  const auto model = LengthModel::defaults();
  const std::vector<Sentence> src = {a}, trg = {b};
  const double expected = length_cost(a.char_len, b.char_len, model) - std::log(model.prior(BeadKind::One)) - 3.0;
  EXPECT_DOUBLE_EQ(bead_cost(BeadKind::One, src, trg, mi.lex, model, 3.0), std::max(0.0, expected));
  EXPECT_DOUBLE_EQ(bead_cost(BeadKind::One, src, trg, mi.lex, model, 0.0),
                   length_cost(a.char_len, b.char_len, model) - std::log(model.prior(BeadKind::One)));
}

TEST(BeadCost, DeletionHasNoDictionaryTerm) {
  Lexicon lex;
  const auto model = LengthModel::defaults();
  const std::vector<Sentence> src = {plain(40)};
  EXPECT_DOUBLE_EQ(bead_cost(BeadKind::Del, src, {}, lex, model, 3.0),
                   length_cost(40, 0, model) - std::log(model.prior(BeadKind::Del)));
  EXPECT_DOUBLE_EQ(bead_cost(BeadKind::Sub, {}, src, lex, model, 3.0),
                   length_cost(0, 40, model) - std::log(model.prior(BeadKind::Sub)));
}

TEST(BeadCost, ExpandBeatsTwoOnesForSplitTranslation) {
  // 20 source chars against two 10-char targets, no lexicon: hand arithmetic
  // over the formulas says the 1-2 bead is cheaper than 1-1 + 0-1.
  Lexicon lex;
  const auto model = LengthModel::defaults();
  const std::vector<Sentence> src = {plain(20)};
  const std::vector<Sentence> trg = {plain(10), plain(10)};
  const double expand = bead_cost(BeadKind::Expand, src, trg, lex, model, 3.0);
  const double split = bead_cost(BeadKind::One, src, std::span(trg).first(1), lex, model, 3.0) +
                       bead_cost(BeadKind::Sub, {}, std::span(trg).last(1), lex, model, 3.0);
  EXPECT_NEAR(expand, -std::log(model.prior(BeadKind::Expand)), 1e-12);
  EXPECT_LT(expand, split);
  const auto ladder = align_sentences(src, trg, lex, {});
  ASSERT_EQ(ladder.beads.size(), 1u);
  EXPECT_EQ(ladder.beads[0].kind, BeadKind::Expand);
}

TEST(Align, EmptyInputs) {
  Lexicon lex;
  const auto ladder = align_sentences({}, {}, lex);
  EXPECT_TRUE(ladder.beads.empty());
  EXPECT_DOUBLE_EQ(ladder.total_cost, 0.0);
}

TEST(Align, ThreeByThreeMirror) {
  Mirror mi;
  std::mt19937_64 rng(2);
  std::vector<Sentence> src, trg;
  for (std::size_t n : {4u, 9u, 6u}) {
    auto [a, b] = mi.pair(rng, n);
    src.push_back(a);
    trg.push_back(b);
  }
  const auto ladder = align_sentences(src, trg, mi.lex);
  ASSERT_EQ(ladder.beads.size(), 3u);
  for (const auto& b : ladder.beads) EXPECT_EQ(b.kind, BeadKind::One);
}

TEST(Align, MatchesBruteForceAndTiles) {
  Mirror mi;
  std::mt19937_64 rng(4);
  AlignConfig cfg;
  cfg.band = false;
  for (int inst = 0; inst < 200; ++inst) {
    const std::size_t n = bounded_uniform(rng, 6), m = bounded_uniform(rng, 6);
    std::vector<Sentence> src, trg;
    for (std::size_t i = 0; i < std::max(n, m); ++i) {
      auto [a, b] = mi.pair(rng, 1 + bounded_uniform(rng, 8));
      if (i < n) src.push_back(a);
      if (i < m) trg.push_back(bounded_uniform(rng, 3) ? b : mi.pair(rng, 1 + bounded_uniform(rng, 8)).second);
    }
    const auto ladder = align_sentences(src, trg, mi.lex, cfg);
    expect_tiling(ladder, n, m);
    const double brute = oracle::brute_force_alignment(n, m, [&](BeadKind k, std::size_t i, std::size_t j) {
      return bead_cost(k, std::span<const Sentence>(src).subspan(i, src_count(k)),
                       std::span<const Sentence>(trg).subspan(j, trg_count(k)), mi.lex, cfg.model, cfg.lambda);
    });
    EXPECT_NEAR(ladder.total_cost, brute, 1e-9);
  }
}

TEST(Align, TilingCounts) {
  std::size_t count = 0;
  oracle::brute_force_alignment(5, 5, [](BeadKind, std::size_t, std::size_t) { return 0.0; }, &count);
  EXPECT_EQ(count, 4572u);
  oracle::brute_force_alignment(6, 6, [](BeadKind, std::size_t, std::size_t) { return 0.0; }, &count);
  EXPECT_EQ(count, 30525u);
}

TEST(Align, BandedLadderTiles) {
  Mirror mi;
  std::mt19937_64 rng(6);
  std::vector<Sentence> src, trg;
  for (int i = 0; i < 300; ++i) {
    auto [a, b] = mi.pair(rng, 2 + bounded_uniform(rng, 10));
    src.push_back(a);
    if (i % 37 != 5) trg.push_back(b);
  }
  const auto ladder = align_sentences(src, trg, mi.lex);
  expect_tiling(ladder, src.size(), trg.size());
  std::size_t ones = 0;
  for (const auto& b : ladder.beads) ones += b.kind == BeadKind::One;
  EXPECT_GE(ones, trg.size() - 10);
}

TEST(Align, AppendingUnrelatedSentenceNeverLowersCost) {
  Mirror mi;
  std::mt19937_64 rng(9);
  AlignConfig cfg;
  cfg.band = false;
  for (int inst = 0; inst < 200; ++inst) {
    std::vector<Sentence> src, trg;
    for (std::size_t i = 0, n = 1 + bounded_uniform(rng, 5); i < n; ++i) {
      auto [a, b] = mi.pair(rng, 1 + bounded_uniform(rng, 8));
      src.push_back(a);
      trg.push_back(b);
    }
    const double base = align_sentences(src, trg, mi.lex, cfg).total_cost;
    auto extra = src;
    extra.push_back(plain(1 + bounded_uniform(rng, 40)));
    EXPECT_GE(align_sentences(extra, trg, mi.lex, cfg).total_cost, base - 1e-12);
    auto extra_trg = trg;
    extra_trg.push_back(plain(1 + bounded_uniform(rng, 40)));
    EXPECT_GE(align_sentences(src, extra_trg, mi.lex, cfg).total_cost, base - 1e-12);
  }
}

TEST(Align, TransposedInputGivesTransposedLadder) {
  Mirror mi;
  std::mt19937_64 rng(12);
  AlignConfig fwd;
  fwd.band = false;
  AlignConfig rev = fwd;
  rev.dir = Direction::ZhToJa;
  for (int inst = 0; inst < 50; ++inst) {
    std::vector<Sentence> src, trg;
    for (std::size_t i = 0, n = 2 + bounded_uniform(rng, 6); i < n; ++i) {
      auto [a, b] = mi.pair(rng, 3 + bounded_uniform(rng, 6));
      src.push_back(a);
      trg.push_back(b);
    }
    const auto a = align_sentences(src, trg, mi.lex, fwd);
    const auto b = align_sentences(trg, src, mi.lex, rev);
    ASSERT_EQ(a.beads.size(), b.beads.size());
    for (std::size_t k = 0; k < a.beads.size(); ++k) {
      EXPECT_EQ(b.beads[k].kind, transpose(a.beads[k].kind));
      EXPECT_EQ(b.beads[k].src, a.beads[k].trg);
      EXPECT_EQ(b.beads[k].trg, a.beads[k].src);
    }
  }
}

TEST(Align, ReestimationKeepsMirrorAlignment) {
  Mirror mi;
  std::mt19937_64 rng(14);
  std::vector<Sentence> src, trg;
  for (int i = 0; i < 20; ++i) {
    auto [a, b] = mi.pair(rng, 2 + bounded_uniform(rng, 6));
    src.push_back(a);
    trg.push_back(b);
  }
  AlignConfig cfg;
  cfg.reestimate = true;
  const auto ladder = align_sentences(src, trg, mi.lex, cfg);
  ASSERT_EQ(ladder.beads.size(), 20u);
  for (const auto& b : ladder.beads) EXPECT_EQ(b.kind, BeadKind::One);
}

TEST(ExtractPairs, OnesInOrderAndSkips) {
  const std::vector<Sentence> src = {plain(3), plain(4), plain(5)};
  const std::vector<Sentence> trg = {plain(6), plain(7), plain(8)};
  AlignmentLadder ones;
  for (std::size_t i = 0; i < 3; ++i) ones.beads.push_back({BeadKind::One, {i, 1}, {i, 1}, 1.0});
  const auto pairs = extract_pairs(ones, src, trg, 8.0);
  ASSERT_EQ(pairs.size(), 3u);
  EXPECT_EQ(pairs[2].src, src[2].text);
  EXPECT_EQ(pairs[2].trg, trg[2].text);

  AlignmentLadder del;
  del.beads.push_back({BeadKind::Del, {0, 1}, {0, 0}, 0.5});
  EXPECT_TRUE(extract_pairs(del, src, trg, 8.0).empty());

  AlignmentLadder mixed;
  mixed.beads = {{BeadKind::One, {0, 1}, {0, 1}, 1.0}, {BeadKind::Expand, {1, 1}, {1, 2}, 9.5}, {BeadKind::Del, {2, 1}, {3, 0}, 0.0}};
  const auto kept = extract_pairs(mixed, src, trg, 8.0);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].bead.kind, BeadKind::One);

  AlignmentLadder merge;
  merge.beads = {{BeadKind::Contract, {0, 2}, {0, 1}, 1.0}};
  EXPECT_EQ(extract_pairs(merge, src, trg, 8.0).at(0).src, src[0].text + src[1].text);
}

TEST(Ladder, TsvFormat) {
  AlignmentLadder l;
  l.beads = {{BeadKind::One, {0, 1}, {0, 1}, 0.25}, {BeadKind::Expand, {1, 1}, {1, 2}, 1.0}};
  std::ostringstream out;
  write_ladder_tsv(out, l);
  EXPECT_EQ(out.str(), "0\t1\t0\t1\t1-1\t0.250000\n1\t1\t1\t2\t1-2\t1.000000\n");
}

TEST(BeadKind, NamesAndTranspose) {
  for (BeadKind k : kAllBeadKinds) {
    EXPECT_EQ(parse_bead_kind(to_string(k)), k);
    EXPECT_EQ(transpose(transpose(k)), k);
    EXPECT_EQ(src_count(transpose(k)), trg_count(k));
  }
}
