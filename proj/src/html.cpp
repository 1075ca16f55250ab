#include "localmine/html.hpp"

#include <unicode/ucnv.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <memory>
#include <optional>
#include <unordered_map>

#include "localmine/error.hpp"
#include "localmine/utf8.hpp"

namespace localmine {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::optional<std::string> declared_charset(std::string_view bytes) {
  const std::string head = lower(bytes.substr(0, std::min<std::size_t>(bytes.size(), 8192)));
  std::size_t pos = 0;
  while ((pos = head.find("charset", pos)) != std::string::npos) {
    std::size_t i = pos + 7;
    pos = i;
    while (i < head.size() && (head[i] == ' ' || head[i] == '\t')) ++i;
    if (i >= head.size() || head[i] != '=') continue;
    ++i;
    while (i < head.size() && (head[i] == ' ' || head[i] == '"' || head[i] == '\'')) ++i;
    std::size_t j = i;
    while (j < head.size() && (std::isalnum(static_cast<unsigned char>(head[j])) || head[j] == '-' || head[j] == '_'))
      ++j;
    if (j > i) return head.substr(i, j - i);
  }
  return std::nullopt;
}

// ICU converter for the two supported legacy families.
const char* converter_for(const std::string& charset) {
  static const std::array<std::string_view, 8> sjis = {"shift_jis", "shift-jis", "sjis",   "x-sjis",
                                                       "windows-31j", "cp932",   "ms_kanji", "csshiftjis"};
  static const std::array<std::string_view, 7> gbk = {"gbk", "gb2312", "gb18030", "cp936",
                                                      "x-gbk", "euc-cn", "csgb2312"};
  if (std::find(sjis.begin(), sjis.end(), charset) != sjis.end()) return "windows-31j";
  if (std::find(gbk.begin(), gbk.end(), charset) != gbk.end()) return "gb18030";
  return nullptr;
}

std::string convert_to_utf8(std::string_view bytes, const char* name) {
  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<UConverter, decltype(&ucnv_close)> conv(ucnv_open(name, &status), &ucnv_close);
  if (U_FAILURE(status)) throw Error("encoding");
  ucnv_setToUCallBack(conv.get(), UCNV_TO_U_CALLBACK_STOP, nullptr, nullptr, nullptr, &status);
  std::u16string utf16(bytes.size() * 2 + 16, u'\0');
  const int32_t n = ucnv_toUChars(conv.get(), reinterpret_cast<UChar*>(utf16.data()),
                                  static_cast<int32_t>(utf16.size()), bytes.data(),
                                  static_cast<int32_t>(bytes.size()), &status);
  if (U_FAILURE(status)) throw Error("encoding");
  utf16.resize(static_cast<std::size_t>(n));
  std::string out;
  for (std::size_t i = 0; i < utf16.size(); ++i) {
    char32_t cp = utf16[i];
    if (cp >= 0xD800 && cp <= 0xDBFF && i + 1 < utf16.size()) {
      cp = 0x10000 + ((cp - 0xD800) << 10) + (utf16[++i] - 0xDC00);
    }
    utf8::append(out, cp);
  }
  return out;
}

const std::unordered_map<std::string_view, char32_t>& named_entities() {
  static const std::unordered_map<std::string_view, char32_t> table = {
      {"amp", U'&'},     {"lt", U'<'},      {"gt", U'>'},      {"quot", U'"'},    {"apos", U'\''},
      {"nbsp", 0xA0},    {"copy", 0xA9},    {"reg", 0xAE},     {"middot", 0xB7},  {"laquo", 0xAB},
      {"raquo", 0xBB},   {"ndash", 0x2013}, {"mdash", 0x2014}, {"hellip", 0x2026}, {"lsquo", 0x2018},
      {"rsquo", 0x2019}, {"ldquo", 0x201C}, {"rdquo", 0x201D}, {"yen", 0xA5},     {"times", 0xD7},
      {"ensp", 0x2002},  {"emsp", 0x2003},  {"thinsp", 0x2009}, {"trade", 0x2122}, {"bull", 0x2022}};
  return table;
}

void append_decoded(std::string& out, std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '&') {
      out.push_back(text[i]);
      continue;
    }
    const auto semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back('&');
      continue;
    }
    const std::string_view name = text.substr(i + 1, semi - i - 1);
    std::optional<char32_t> cp;
    if (!name.empty() && name[0] == '#') {
      try {
        std::size_t used = 0;
        const bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
        const std::string digits(name.substr(hex ? 2 : 1));
        const unsigned long v = std::stoul(digits, &used, hex ? 16 : 10);
        if (used == digits.size() && v > 0 && v <= 0x10FFFF && !(v >= 0xD800 && v <= 0xDFFF)) cp = static_cast<char32_t>(v);
      } catch (const std::exception&) {
      }
    } else if (auto it = named_entities().find(name); it != named_entities().end()) {
      cp = it->second;
    }
    if (!cp) {
      out.push_back('&');
      continue;
    }
    utf8::append(out, *cp);
    i = semi;
  }
}

std::optional<TagCode> tag_code(std::string_view name) {
  static const std::unordered_map<std::string_view, TagCode> codes = {
      {"h1", TagCode::H1}, {"h2", TagCode::H2}, {"h3", TagCode::H3},      {"h4", TagCode::H4},
      {"h5", TagCode::H5}, {"h6", TagCode::H6}, {"p", TagCode::P},        {"li", TagCode::Li},
      {"td", TagCode::Td}, {"div", TagCode::Div}, {"title", TagCode::Title}, {"img", TagCode::Img},
      {"a", TagCode::A}};
  if (auto it = codes.find(name); it != codes.end()) return it->second;
  return std::nullopt;
}

bool is_block(std::string_view name) {
  static const std::array<std::string_view, 40> blocks = {
      "p",      "div",     "br",     "li",      "ul",         "ol",     "td",     "th",
      "tr",     "table",   "h1",     "h2",      "h3",         "h4",     "h5",     "h6",
      "title",  "section", "article", "header", "footer",     "nav",    "main",   "aside",
      "blockquote", "pre", "dd",     "dt",      "dl",         "form",   "hr",     "address",
      "figure", "figcaption", "option", "caption", "tbody",   "thead",  "body",   "html"};
  return std::find(blocks.begin(), blocks.end(), name) != blocks.end();
}

struct Tag {
  std::string name;
  bool closing = false;
  std::vector<std::pair<std::string, std::string>> attrs;

  std::string attr(std::string_view key) const {
    for (const auto& [k, v] : attrs) {
      if (k == key) return v;
    }
    return {};
  }
};

// Parses the tag starting at html[i] == '<'. Returns the index just past
// '>', or npos if this '<' does not start a tag.
std::size_t parse_tag(std::string_view html, std::size_t i, Tag& tag) {
  std::size_t j = i + 1;
  tag = Tag{};
  if (j < html.size() && html[j] == '/') {
    tag.closing = true;
    ++j;
  }
  if (j >= html.size() || !std::isalpha(static_cast<unsigned char>(html[j]))) return std::string_view::npos;
  std::size_t k = j;
  while (k < html.size() && (std::isalnum(static_cast<unsigned char>(html[k])) || html[k] == '-' || html[k] == ':')) ++k;
  tag.name = lower(html.substr(j, k - j));
  while (k < html.size() && html[k] != '>') {
    if (std::isspace(static_cast<unsigned char>(html[k])) || html[k] == '/') {
      ++k;
      continue;
    }
    std::size_t ns = k;
    while (k < html.size() && !std::isspace(static_cast<unsigned char>(html[k])) && html[k] != '=' && html[k] != '>' &&
           html[k] != '/')
      ++k;
    std::string key = lower(html.substr(ns, k - ns));
    if (key.empty()) {
      ++k;
      continue;
    }
    while (k < html.size() && std::isspace(static_cast<unsigned char>(html[k]))) ++k;
    std::string value;
    if (k < html.size() && html[k] == '=') {
      ++k;
      while (k < html.size() && std::isspace(static_cast<unsigned char>(html[k]))) ++k;
      if (k < html.size() && (html[k] == '"' || html[k] == '\'')) {
        const char q = html[k++];
        const auto end = html.find(q, k);
        const std::size_t stop = end == std::string_view::npos ? html.size() : end;
        append_decoded(value, html.substr(k, stop - k));
        k = end == std::string_view::npos ? html.size() : end + 1;
      } else {
        std::size_t vs = k;
        while (k < html.size() && !std::isspace(static_cast<unsigned char>(html[k])) && html[k] != '>') ++k;
        append_decoded(value, html.substr(vs, k - vs));
      }
    }
    tag.attrs.emplace_back(std::move(key), std::move(value));
  }
  return k < html.size() ? k + 1 : html.size();
}

std::size_t find_ci(std::string_view hay, std::string_view needle, std::size_t from) {
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    bool ok = true;
    for (std::size_t k = 0; k < needle.size() && ok; ++k) {
      ok = std::tolower(static_cast<unsigned char>(hay[i + k])) == needle[k];
    }
    if (ok) return i;
  }
  return std::string_view::npos;
}

bool is_control(char32_t cp) {
  return (cp < 0x20 && cp != U'\n' && cp != U'\t') || (cp >= 0x7F && cp < 0xA0);
}

}  // namespace

std::string decode_html_bytes(std::string_view bytes) {
  if (bytes.size() >= 3 && bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);
  if (utf8::is_valid(bytes)) return std::string(bytes);
  const auto charset = declared_charset(bytes);
  if (!charset) throw Error("encoding");
  const char* conv = converter_for(*charset);
  if (conv == nullptr) throw Error("encoding");
  return convert_to_utf8(bytes, conv);
}

ParsedHtml parse_html(std::string_view html) {
  ParsedHtml out;
  std::string raw;  // text with LF at block boundaries
  raw.reserve(html.size());
  int pre_depth = 0;
  std::size_t i = 0;
  Tag tag;
  while (i < html.size()) {
    const char c = html[i];
    if (c != '<') {
      const auto next = html.find('<', i);
      const std::size_t stop = next == std::string_view::npos ? html.size() : next;
      std::string chunk;
      append_decoded(chunk, html.substr(i, stop - i));
      if (pre_depth == 0) {
        for (char& ch : chunk) {
          if (ch == '\n' || ch == '\r' || ch == '\t') ch = ' ';
        }
      }
      raw += chunk;
      i = stop;
      continue;
    }
    if (html.substr(i, 4) == "<!--") {
      const auto end = html.find("-->", i + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    if (i + 1 < html.size() && (html[i + 1] == '!' || html[i + 1] == '?')) {
      const auto end = html.find('>', i);
      i = end == std::string_view::npos ? html.size() : end + 1;
      continue;
    }
    const std::size_t after = parse_tag(html, i, tag);
    if (after == std::string_view::npos) {
      raw.push_back('<');
      ++i;
      continue;
    }
    i = after;
    if (!tag.closing && (tag.name == "script" || tag.name == "style" || tag.name == "noscript" ||
                         tag.name == "template")) {
      const auto end = find_ci(html, "</" + tag.name, i);
      if (end == std::string_view::npos) {
        i = html.size();
      } else {
        const auto gt = html.find('>', end);
        i = gt == std::string_view::npos ? html.size() : gt + 1;
      }
      continue;
    }
    if (tag.name == "pre") pre_depth += tag.closing ? -1 : 1;
    pre_depth = std::max(pre_depth, 0);
    if (!tag.closing) {
      if (auto code = tag_code(tag.name)) out.content.tag_digest.push_back(*code);
      if (tag.name == "a" || tag.name == "area") {
        if (auto href = tag.attr("href"); !href.empty()) out.links.push_back(href);
      } else if (tag.name == "frame" || tag.name == "iframe") {
        if (auto src = tag.attr("src"); !src.empty()) out.links.push_back(src);
      } else if (tag.name == "base" && out.base_href.empty()) {
        out.base_href = tag.attr("href");
      }
    }
    if (is_block(tag.name)) raw.push_back('\n');
  }

  std::string clean;
  clean.reserve(raw.size());
  for (char32_t cp : utf8::decode(raw)) {
    if (!is_control(cp)) utf8::append(clean, cp);
  }
  std::size_t start = 0;
  while (start <= clean.size()) {
    auto nl = clean.find('\n', start);
    if (nl == std::string::npos) nl = clean.size();
    std::string line = normalize_text(std::string_view(clean).substr(start, nl - start));
    // NFKC can map compatibility characters to line breaks; fold them.
    std::replace(line.begin(), line.end(), '\n', ' ');
    if (!line.empty()) {
      if (!out.content.text.empty()) out.content.text.push_back('\n');
      out.content.text += line;
    }
    start = nl + 1;
  }
  return out;
}

ExtractedText extract_text(std::string_view html_bytes) {
  return parse_html(decode_html_bytes(html_bytes)).content;
}

}  // namespace localmine
