#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace localmine::utf8 {

bool is_valid(std::string_view s);

/// Decodes a valid UTF-8 string. Invalid sequences decode as U+FFFD.
std::u32string decode(std::string_view s);

std::string encode(std::u32string_view s);
void append(std::string& out, char32_t cp);

/// Number of Unicode scalar values.
std::size_t length(std::string_view s);

/// Byte offset of every scalar value plus a final entry equal to s.size().
std::vector<std::size_t> boundaries(std::string_view s);

bool is_space(char32_t cp);

}  // namespace localmine::utf8
