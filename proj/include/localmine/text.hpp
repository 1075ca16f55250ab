#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace localmine {

enum class Language : std::uint8_t { Ja, Zh, Other };

/// "ja", "zh" or "other".
std::string_view to_string(Language lang);
Language parse_language(std::string_view s);

/// Structural HTML tags recorded in a document's digest.
enum class TagCode : std::uint8_t { H1, H2, H3, H4, H5, H6, P, Li, Td, Div, Title, Img, A };

std::string_view to_string(TagCode tag);

struct Sentence {
  std::string text;
  std::size_t char_len = 0;
  std::vector<std::string> tokens;

  static Sentence from_text(std::string text);
};

struct Document {
  std::string url;
  Language lang = Language::Other;
  std::vector<Sentence> sentences;
  std::vector<TagCode> tag_digest;
  std::size_t raw_char_count = 0;
};

/// NFKC, all line separators to LF, runs of spaces/tabs to one space,
/// spaces around line breaks dropped, ends trimmed.
std::string normalize_text(std::string_view raw);

struct DetectorConfig {
  double kana_min = 0.05;
  double han_min = 0.5;
};

struct Detection {
  Language lang = Language::Other;
  double confidence = 0.0;
};

/// Script-class language identification. Kana share is measured against
/// kana+Han characters; Han share against all letters. Throws Error on an
/// empty string.
Detection detect_language(std::string_view text, const DetectorConfig& cfg = {});

bool is_kana(char32_t cp);
bool is_han(char32_t cp);

std::vector<Sentence> split_sentences(std::string_view text, Language lang);

/// Headword set used by the built-in longest-match segmenter.
class Vocabulary {
 public:
  Vocabulary() = default;
  void insert(std::string_view word);
  bool contains(std::string_view word) const { return words_.count(std::string(word)) != 0; }
  std::size_t max_length() const { return max_length_; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
  std::size_t max_length_ = 0;
};

/// Greedy left-to-right longest match with single-character fallback.
/// Tokens never span whitespace; whitespace is dropped.
std::vector<std::string> segment_words(std::string_view text, const Vocabulary& vocab);

/// Plug-in point for external word segmenters.
class Segmenter {
 public:
  virtual ~Segmenter() = default;
  virtual std::vector<std::string> segment(std::string_view text) const = 0;
};

class VocabularySegmenter final : public Segmenter {
 public:
  explicit VocabularySegmenter(std::shared_ptr<const Vocabulary> vocab) : vocab_(std::move(vocab)) {}
  std::vector<std::string> segment(std::string_view text) const override {
    return segment_words(text, *vocab_);
  }

 private:
  std::shared_ptr<const Vocabulary> vocab_;
};

}  // namespace localmine
