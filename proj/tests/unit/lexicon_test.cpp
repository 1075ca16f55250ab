#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "localmine/hash.hpp"
#include "localmine/lexicon.hpp"
#include "localmine/utf8.hpp"
#include "oracles.hpp"

using namespace localmine;

namespace {

class SpaceSegmenter : public Segmenter {
 public:
  std::vector<std::string> segment(std::string_view text) const override {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
      if (c == ' ') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  }
};

}  // namespace

TEST(Reduce, SingleTokenKept) {
  SpaceSegmenter seg;
  const auto out = reduce_dictionary({{"日本", "日本"}}, seg, seg);
  EXPECT_EQ(out, (std::vector<LexiconEntry>{{"日本", "日本"}}));
}

TEST(Reduce, MultiTokenDropped) {
  SpaceSegmenter seg;
  EXPECT_TRUE(reduce_dictionary({{"日本 語学", "日语 学"}}, seg, seg).empty());
  EXPECT_TRUE(reduce_dictionary({{"日本", "日语 学"}}, seg, seg).empty());
}

TEST(Reduce, SubsetAndSingleTokenProperty) {
  std::mt19937_64 rng(2);
  SpaceSegmenter seg;
  const std::vector<std::string> words = {"甲", "乙", "丙", "丁", "甲乙", "丙丁"};
  for (int round = 0; round < 100; ++round) {
    std::vector<LexiconEntry> raw;
    for (int i = 0; i < 30; ++i) {
      std::string ja = words[bounded_uniform(rng, words.size())];
      std::string zh = words[bounded_uniform(rng, words.size())];
      if (bounded_uniform(rng, 3) == 0) ja += " " + words[bounded_uniform(rng, words.size())];
      if (bounded_uniform(rng, 3) == 0) zh += " " + words[bounded_uniform(rng, words.size())];
      raw.push_back({ja, zh});
    }
    const auto out = reduce_dictionary(raw, seg, seg);
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : out) {
      EXPECT_NE(std::find(raw.begin(), raw.end(), e), raw.end());
      EXPECT_EQ(seg.segment(e.ja).size(), 1u);
      EXPECT_EQ(seg.segment(e.zh).size(), 1u);
      EXPECT_TRUE(seen.insert({e.ja, e.zh}).second);
    }
  }
}

TEST(Augment, ExistingPairUnchanged) {
  const auto lex = augment_with_char_map({{"国", "国"}, {"日本", "日本"}}, {{"国", "国"}});
  EXPECT_EQ(lex.size(), 2u);
}

TEST(Augment, DisjointUnion) {
  std::vector<LexiconEntry> words, chars;
  for (int i = 0; i < 100; ++i) words.push_back({"w" + std::to_string(i) + "語", "w" + std::to_string(i) + "语"});
  const std::u32string ja = U"亜唖娃阿哀愛挨姶逢葵茜穐悪握渥旭葦芦鯵梓圧斡扱宛姐虻飴絢綾鮎或粟袷安庵按暗案闇鞍杏以伊位依偉囲夷委威尉惟意慰易椅為畏異移維緯胃萎衣謂違遺医";
  for (std::size_t i = 0; i < 60; ++i) {
    const std::string c = utf8::encode(ja.substr(i, 1));
    chars.push_back({c, c});
  }
  EXPECT_EQ(augment_with_char_map(words, chars).size(), 160u);
}

TEST(Augment, BadCharRowsReported) {
  std::vector<CharMapRowError> errors;
  const auto lex = augment_with_char_map({}, {{"国", "国"}, {"日本", "日"}, {"a", ""}}, &errors);
  EXPECT_EQ(lex.size(), 1u);
  ASSERT_EQ(errors.size(), 2u);
  EXPECT_EQ(errors[0].row, 1u);
}

TEST(Lexicon, IndexRoundTrip) {
  std::mt19937_64 rng(6);
  const std::vector<std::string> ja = {"あ", "い", "う", "え", "お", "か"};
  const std::vector<std::string> zh = {"阿", "伊", "乌", "诶", "哦"};
  for (int round = 0; round < 50; ++round) {
    Lexicon lex;
    std::set<std::pair<std::string, std::string>> entries;
    for (int i = 0; i < 15; ++i) {
      const auto& j = ja[bounded_uniform(rng, ja.size())];
      const auto& z = zh[bounded_uniform(rng, zh.size())];
      EXPECT_EQ(lex.add(j, z), entries.insert({j, z}).second);
    }
    std::set<std::pair<std::string, std::string>> from_ja, from_zh;
    for (const auto& j : ja)
      for (const auto& z : lex.translations(j, Direction::JaToZh)) from_ja.insert({j, z});
    for (const auto& z : zh)
      for (const auto& j : lex.translations(z, Direction::ZhToJa)) from_zh.insert({j, z});
    EXPECT_EQ(from_ja, entries);
    EXPECT_EQ(from_zh, entries);
  }
}

TEST(Coverage, PerfectMatch) {
  Lexicon lex;
  lex.add("日本", "日本");
  EXPECT_DOUBLE_EQ(coverage({"日本"}, {"日本"}, lex, Direction::JaToZh), 1.0);
}

TEST(Coverage, EmptyLexicon) {
  Lexicon lex;
  EXPECT_DOUBLE_EQ(coverage({"a", "b"}, {"a", "b"}, lex, Direction::JaToZh), 0.0);
  EXPECT_DOUBLE_EQ(coverage({}, {"a"}, lex, Direction::JaToZh), 0.0);
}

TEST(Coverage, DoubleTranslationAndCollision) {
  // a->x; b->{x,y}; c->x collides after a and b consume x and y; d->z; e unknown.
  Lexicon lex;
  lex.add("a", "x");
  lex.add("b", "x");
  lex.add("b", "y");
  lex.add("c", "x");
  lex.add("d", "z");
  EXPECT_DOUBLE_EQ(coverage({"a", "b", "c", "d", "e"}, {"x", "y", "z"}, lex, Direction::JaToZh), 0.6);
  EXPECT_EQ(greedy_match_count({"a", "b", "c", "d", "e"}, {"x", "y", "z"}, lex, Direction::JaToZh), 3u);
}

TEST(Coverage, RangeAndMonotoneUnderAddedEntries) {
  std::mt19937_64 rng(10);
  const std::vector<std::string> src = {"s0", "s1", "s2", "s3", "s4"};
  const std::vector<std::string> trg = {"t0", "t1", "t2", "t3"};
  std::size_t increases = 0;
  for (int round = 0; round < 300; ++round) {
    std::vector<std::string> a, b;
    for (std::size_t i = 0, n = 1 + bounded_uniform(rng, 6); i < n; ++i) a.push_back(src[bounded_uniform(rng, src.size())]);
    for (std::size_t i = 0, n = 1 + bounded_uniform(rng, 6); i < n; ++i) b.push_back(trg[bounded_uniform(rng, trg.size())]);
    Lexicon lex;
    double prev = coverage(a, b, lex, Direction::JaToZh);
    for (int k = 0; k < 8; ++k) {
      lex.add(src[bounded_uniform(rng, src.size())], trg[bounded_uniform(rng, trg.size())]);
      const double cur = coverage(a, b, lex, Direction::JaToZh);
      EXPECT_GE(cur, 0.0);
      EXPECT_LE(cur, 1.0);
      EXPECT_GE(cur, prev);
      increases += cur > prev;
      prev = cur;
    }
  }
  EXPECT_GT(increases, 0u);
}

TEST(LexiconFiles, StarterDataLoads) {
  const auto words = read_pair_tsv(oracle::data_file("starter_lexicon.tsv"));
  const auto chars = read_pair_tsv(oracle::data_file("kanji_simplified.tsv"));
  EXPECT_GT(words.size(), 1000u);
  EXPECT_GT(chars.size(), 1000u);
  std::vector<CharMapRowError> errors;
  const auto lex = augment_with_char_map(words, chars, &errors);
  EXPECT_TRUE(errors.empty());
  EXPECT_GE(lex.size(), words.size());
}
