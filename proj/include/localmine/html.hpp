#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "localmine/text.hpp"

namespace localmine {

struct ExtractedText {
  std::string text;  // normalized lines joined by LF
  std::vector<TagCode> tag_digest;
};

/// Lenient HTML scan of an already-decoded UTF-8 page.
struct ParsedHtml {
  ExtractedText content;
  std::vector<std::string> links;  // raw href/src values in document order
  std::string base_href;
};

/// UTF-8 first, then a <meta> charset of the Shift_JIS or GBK families.
/// Throws Error("encoding") when neither applies.
std::string decode_html_bytes(std::string_view bytes);

ParsedHtml parse_html(std::string_view utf8_html);

/// Script/style/comments removed, block boundaries become line breaks, each
/// line normalized. Throws Error("encoding") for undecodable bytes.
ExtractedText extract_text(std::string_view html_bytes);

}  // namespace localmine
