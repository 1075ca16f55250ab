#include "localmine/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/uscript.h>
#include <unicode/unistr.h>

#include "localmine/error.hpp"
#include "localmine/utf8.hpp"

namespace localmine {

std::string_view to_string(Language lang) {
  switch (lang) {
    case Language::Ja:
      return "ja";
    case Language::Zh:
      return "zh";
    case Language::Other:
      break;
  }
  return "other";
}

Language parse_language(std::string_view s) {
  if (s == "ja") return Language::Ja;
  if (s == "zh") return Language::Zh;
  if (s == "other") return Language::Other;
  throw Error("unknown language tag: " + std::string(s));
}

std::string_view to_string(TagCode tag) {
  static constexpr std::string_view names[] = {"h1", "h2", "h3", "h4", "h5", "h6", "p",
                                                "li", "td", "div", "title", "img", "a"};
  return names[static_cast<std::size_t>(tag)];
}

Sentence Sentence::from_text(std::string text) {
  Sentence s;
  s.char_len = utf8::length(text);
  s.text = std::move(text);
  return s;
}

namespace {

std::u32string nfkc(std::string_view raw) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFKC normalizer unavailable");
  const auto src = icu::UnicodeString::fromUTF8(icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  icu::UnicodeString dst = norm->normalize(src, status);
  if (U_FAILURE(status)) throw Error("NFKC normalization failed");
  std::string out;
  dst.toUTF8String(out);
  return utf8::decode(out);
}

bool is_line_break(char32_t cp) {
  return cp == U'\n' || cp == U'\r' || cp == 0x85 || cp == 0x2028 || cp == 0x2029 || cp == U'\v' ||
         cp == U'\f';
}

}  // namespace

std::string normalize_text(std::string_view raw) {
  const std::u32string in = nfkc(raw);
  std::u32string out;
  out.reserve(in.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < in.size(); ++i) {
    char32_t cp = in[i];
    if (is_line_break(cp)) {
      if (cp == U'\r' && i + 1 < in.size() && in[i + 1] == U'\n') ++i;
      pending_space = false;
      while (!out.empty() && out.back() == U' ') out.pop_back();
      out.push_back(U'\n');
      continue;
    }
    if (cp == U' ' || cp == U'\t') {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty() && out.back() != U'\n') out.push_back(U' ');
    pending_space = false;
    out.push_back(cp);
  }
  std::size_t b = 0;
  while (b < out.size() && (out[b] == U'\n' || out[b] == U' ')) ++b;
  std::size_t e = out.size();
  while (e > b && (out[e - 1] == U'\n' || out[e - 1] == U' ')) --e;
  return utf8::encode(std::u32string_view(out).substr(b, e - b));
}

bool is_kana(char32_t cp) {
  return (cp >= 0x3041 && cp <= 0x309F) || (cp >= 0x30A0 && cp <= 0x30FF) ||
         (cp >= 0x31F0 && cp <= 0x31FF) || (cp >= 0xFF66 && cp <= 0xFF9D);
}

bool is_han(char32_t cp) {
  UErrorCode status = U_ZERO_ERROR;
  return uscript_getScript(static_cast<UChar32>(cp), &status) == USCRIPT_HAN && U_SUCCESS(status);
}

Detection detect_language(std::string_view text, const DetectorConfig& cfg) {
  if (text.empty()) throw Error("empty input");
  std::size_t kana = 0;
  std::size_t han = 0;
  std::size_t letters = 0;
  for (char32_t cp : utf8::decode(text)) {
    if (is_kana(cp)) {
      ++kana;
      ++letters;
    } else if (is_han(cp)) {
      ++han;
      ++letters;
    } else if (u_isalpha(static_cast<UChar32>(cp))) {
      ++letters;
    }
  }
  const std::size_t cjk = kana + han;
  const double kana_frac = cjk ? static_cast<double>(kana) / static_cast<double>(cjk) : 0.0;
  const double han_frac = letters ? static_cast<double>(han) / static_cast<double>(letters) : 0.0;
  if (cjk > 0 && kana_frac >= cfg.kana_min) return {Language::Ja, kana_frac};
  if (han_frac >= cfg.han_min) return {Language::Zh, han_frac};
  const double other = letters ? static_cast<double>(letters - cjk) / static_cast<double>(letters) : 1.0;
  return {Language::Other, other};
}

namespace {

bool is_terminal(char32_t cp) {
  switch (cp) {
    case U'。':
    case U'．':
    case U'！':
    case U'？':
    case U'!':
    case U'?':
    case U'.':
      return true;
    default:
      return false;
  }
}

bool is_closer(char32_t cp) {
  switch (cp) {
    case U'」':
    case U'』':
    case U'）':
    case U')':
    case U'】':
    case U'〕':
    case U'〉':
    case U'》':
    case U'"':
    case U'\'':
    case U'”':
    case U'’':
    case U'］':
    case U']':
    case U'｝':
    case U'}':
      return true;
    default:
      return false;
  }
}

bool is_inline_space(char32_t cp) { return cp != U'\n' && utf8::is_space(cp); }

}  // namespace

std::vector<Sentence> split_sentences(std::string_view text, Language /*lang*/) {
  const std::u32string s = utf8::decode(text);
  std::vector<Sentence> out;
  std::u32string carry;  // a too-short leading fragment waiting for a successor
  std::u32string cur;

  auto flush = [&]() {
    std::size_t b = 0;
    while (b < cur.size() && utf8::is_space(cur[b])) ++b;
    std::size_t e = cur.size();
    while (e > b && utf8::is_space(cur[e - 1])) --e;
    std::u32string piece = carry + cur.substr(b, e - b);
    cur.clear();
    if (piece.empty()) return;
    if (piece.size() < 2) {
      if (!out.empty()) {
        out.back().text += utf8::encode(piece);
        out.back().char_len += piece.size();
      } else {
        carry = piece;
      }
      return;
    }
    carry.clear();
    out.push_back(Sentence::from_text(utf8::encode(piece)));
  };

  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n;) {
    const char32_t cp = s[i];
    if (cp == U'\n') {
      flush();
      ++i;
      continue;
    }
    if (!is_terminal(cp)) {
      cur.push_back(cp);
      ++i;
      continue;
    }
    std::size_t j = i;
    bool only_periods = true;
    while (j < n && is_terminal(s[j])) {
      only_periods = only_periods && s[j] == U'.';
      ++j;
    }
    while (j < n && is_closer(s[j])) ++j;
    cur.append(s, i, j - i);
    i = j;
    if (only_periods && j < n && !utf8::is_space(s[j])) continue;
    flush();
    while (i < n && is_inline_space(s[i])) ++i;
  }
  flush();
  if (!carry.empty()) out.push_back(Sentence::from_text(utf8::encode(carry)));
  return out;
}

void Vocabulary::insert(std::string_view word) {
  if (word.empty()) return;
  const std::size_t len = utf8::length(word);
  if (words_.emplace(word).second && len > max_length_) max_length_ = len;
}

std::vector<std::string> segment_words(std::string_view text, const Vocabulary& vocab) {
  const auto bounds = utf8::boundaries(text);
  const std::size_t n = bounds.size() - 1;
  const std::u32string cps = utf8::decode(text);
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < n) {
    if (utf8::is_space(cps[i])) {
      ++i;
      continue;
    }
    std::size_t run_end = i;
    while (run_end < n && !utf8::is_space(cps[run_end])) ++run_end;
    const std::size_t longest = std::min(vocab.max_length(), run_end - i);
    std::size_t take = 1;
    for (std::size_t len = longest; len >= 2; --len) {
      if (vocab.contains(text.substr(bounds[i], bounds[i + len] - bounds[i]))) {
        take = len;
        break;
      }
    }
    tokens.emplace_back(text.substr(bounds[i], bounds[i + take] - bounds[i]));
    i += take;
  }
  return tokens;
}

}  // namespace localmine
