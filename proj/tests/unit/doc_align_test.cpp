#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "localmine/doc_align.hpp"
#include "localmine/error.hpp"
#include "localmine/hash.hpp"
#include "localmine/lexicon.hpp"
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

Document doc(const std::string& url, Language lang, const std::vector<std::vector<std::string>>& sents,
             std::vector<TagCode> digest) {
  Document d;
  d.url = url;
  d.lang = lang;
  for (const auto& s : sents) {
    d.sentences.push_back(sentence(s));
    d.raw_char_count += d.sentences.back().char_len;
  }
  d.tag_digest = std::move(digest);
  return d;
}

}  // namespace

TEST(DocSimilarity, MirrorPages) {
  Lexicon lex;
  lex.add("日本", "日本");
  lex.add("会社", "公司");
  const std::vector<TagCode> digest = {TagCode::H1, TagCode::P, TagCode::P};
  const Document ja = doc("http://x.jp/ja/a.html", Language::Ja, {{"日本"}, {"会社"}}, digest);
  const Document zh = doc("http://x.jp/zh/a.html", Language::Zh, {{"日本"}, {"公司"}}, digest);
  const auto s = doc_similarity(ja, zh, lex);
  EXPECT_DOUBLE_EQ(s.features.dict_sim, 1.0);
  EXPECT_DOUBLE_EQ(s.features.struct_sim, 1.0);
  EXPECT_DOUBLE_EQ(s.features.len_ratio, 1.0);
  EXPECT_DOUBLE_EQ(s.features.url_sim, 1.0);
  EXPECT_NEAR(s.score, 1.0, 1e-12);
}

TEST(DocSimilarity, UrlMarkersStripped) {
  const DocAlignConfig cfg;
  EXPECT_DOUBLE_EQ(url_similarity("http://x.jp/ja/news/1.html", "http://x.jp/zh/news/1.html", cfg), 1.0);
  EXPECT_EQ(strip_language_markers("http://x.jp/news/1.html?lang=ja&id=3", cfg),
            strip_language_markers("http://x.jp/news/1.html?lang=zh&id=3", cfg));
  EXPECT_LT(url_similarity("http://x.jp/ja/news/1.html", "http://x.jp/zh/jobs.html", cfg), 1.0);
}

TEST(DocSimilarity, StructureEditDistance) {
  const std::vector<TagCode> a = {TagCode::P, TagCode::P, TagCode::H1};
  const std::vector<TagCode> b = {TagCode::P, TagCode::H1};
  EXPECT_DOUBLE_EQ(edit_similarity(a, b), 1.0 - 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(edit_similarity(std::vector<int>{}, std::vector<int>{}), 1.0);
}

TEST(DocSimilarity, ScoresInUnitInterval) {
  std::mt19937_64 rng(5);
  Lexicon lex;
  const std::vector<std::string> ja = {"あ", "い", "う", "え"}, zh = {"阿", "伊", "乌", "诶"};
  for (std::size_t i = 0; i < ja.size(); ++i) lex.add(ja[i], zh[i]);
  for (int round = 0; round < 300; ++round) {
    auto random_doc = [&](const std::vector<std::string>& words, Language lang, const std::string& url) {
      std::vector<std::vector<std::string>> sents(bounded_uniform(rng, 4));
      for (auto& s : sents)
        for (std::size_t k = 0, n = 1 + bounded_uniform(rng, 5); k < n; ++k) s.push_back(words[bounded_uniform(rng, words.size())]);
      std::vector<TagCode> digest(bounded_uniform(rng, 5), TagCode::P);
      return doc(url, lang, sents, digest);
    };
    const auto s = doc_similarity(random_doc(ja, Language::Ja, "http://a.jp/ja/" + std::to_string(round)),
                                  random_doc(zh, Language::Zh, "http://a.jp/zh/x"), lex);
    for (double v : {s.score, s.features.dict_sim, s.features.url_sim, s.features.struct_sim, s.features.len_ratio}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(DocWeights, MustSumToOne) {
  DocWeights w;
  w.dict = 0.9;
  EXPECT_THROW(w.validate(), FatalError);
  DocWeights ok;
  EXPECT_NO_THROW(ok.validate());
}

TEST(GreedyMatch, TwoByTwoHandRun) {
  std::vector<MatchCandidate> c = {{0, 0, 0.9, 0, "A", "X"}, {0, 1, 0.8, 0, "A", "Y"}, {1, 1, 0.7, 0, "B", "Y"},
                                   {1, 0, 0.2, 0, "B", "X"}};
  const auto m = greedy_match(c, 0.1);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].ja_url + m[0].zh_url, "AX");
  EXPECT_EQ(m[1].ja_url + m[1].zh_url, "BY");
}

TEST(GreedyMatch, TieBreaksOnUrlSimilarityThenUrls) {
  std::vector<MatchCandidate> c = {{0, 0, 0.5, 0.2, "a", "x"}, {0, 1, 0.5, 0.9, "a", "y"}};
  EXPECT_EQ(greedy_match(c, 0.1).front().zh_index, 1u);
  std::vector<MatchCandidate> d = {{1, 0, 0.5, 0.5, "b", "x"}, {0, 0, 0.5, 0.5, "a", "x"}};
  EXPECT_EQ(greedy_match(d, 0.1).front().ja_index, 0u);
}

TEST(GreedyMatch, MatchesHungarianOnGappedInstances) {
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int checked = 0;
  for (int inst = 0; inst < 500; ++inst) {
    const std::size_t n = 1 + bounded_uniform(rng, 8);
    std::vector<std::size_t> perm(n);
    for (std::size_t j = 0; j < n; ++j) perm[j] = j;
    seeded_shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::vector<double>> w(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const double top = 0.6 + 0.4 * unit(rng);
      for (std::size_t j = 0; j < n; ++j) w[i][j] = unit(rng) * 0.5;
      w[i][perm[i]] = top;
    }
    std::vector<MatchCandidate> cands;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) cands.push_back({i, j, w[i][j], 0.0, std::to_string(i), std::to_string(j)});
    std::vector<std::pair<std::size_t, std::size_t>> got;
    for (const auto& c : greedy_match(cands, 0.4)) got.emplace_back(c.ja_index, c.zh_index);
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, oracle::best_assignment(w, 0.4));
    ++checked;
  }
  EXPECT_EQ(checked, 500);
}

TEST(MatchDocuments, SinglePairAboveThreshold) {
  Lexicon lex;
  lex.add("日本", "日本");
  const std::vector<TagCode> digest = {TagCode::P};
  const auto pairs = match_documents({doc("http://x.jp/ja/", Language::Ja, {{"日本"}}, digest)},
                                     {doc("http://x.jp/zh/", Language::Zh, {{"日本"}}, digest)}, lex);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].ja_index, 0u);
  EXPECT_EQ(pairs[0].zh_index, 0u);
}

TEST(MatchDocuments, TenPageMirrorAndPermutationInvariance) {
  Lexicon lex;
  std::vector<std::string> ja_words, zh_words;
  for (int i = 0; i < 60; ++i) {
    ja_words.push_back("j" + std::to_string(i));
    zh_words.push_back("z" + std::to_string(i));
    lex.add(ja_words.back(), zh_words.back());
  }
  std::mt19937_64 rng(10);
  std::vector<Document> ja, zh;
  const std::vector<std::string> names = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "k"};
  for (std::size_t p = 0; p < names.size(); ++p) {
    std::vector<std::vector<std::string>> sj, sz;
    const std::size_t n_sent = 2 + bounded_uniform(rng, 5);
    for (std::size_t s = 0; s < n_sent; ++s) {
      std::vector<std::string> a, b;
      for (std::size_t k = 0, n = 2 + bounded_uniform(rng, 6); k < n; ++k) {
        const std::size_t w = bounded_uniform(rng, ja_words.size());
        a.push_back(ja_words[w]);
        b.push_back(zh_words[w]);
      }
      sj.push_back(a);
      sz.push_back(b);
    }
    std::vector<TagCode> digest(n_sent, TagCode::P);
    ja.push_back(doc("http://m.jp/ja/" + names[p] + ".html", Language::Ja, sj, digest));
    zh.push_back(doc("http://m.jp/zh/" + names[p] + ".html", Language::Zh, sz, digest));
  }
  auto correct = [&](const std::vector<Document>& js, const std::vector<Document>& zs) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& p : match_documents(js, zs, lex)) out.insert({js[p.ja_index].url, zs[p.zh_index].url});
    return out;
  };
  const auto base = correct(ja, zh);
  std::size_t right = 0;
  for (const auto& [a, b] : base) right += a.substr(a.rfind('/')) == b.substr(b.rfind('/'));
  EXPECT_GE(right, 9u);
  std::set<std::string> used_ja, used_zh;
  for (const auto& [a, b] : base) {
    EXPECT_TRUE(used_ja.insert(a).second);
    EXPECT_TRUE(used_zh.insert(b).second);
  }
  auto ja2 = ja, zh2 = zh;
  seeded_shuffle(ja2.begin(), ja2.end(), rng);
  seeded_shuffle(zh2.begin(), zh2.end(), rng);
  EXPECT_EQ(correct(ja2, zh2), base);
}
