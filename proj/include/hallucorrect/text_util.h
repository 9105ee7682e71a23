#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hallucorrect {

std::string trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);
bool starts_with_ci(std::string_view s, std::string_view prefix);

// Splits on ASCII whitespace, dropping empty tokens.
std::vector<std::string> split_words(std::string_view text);
// A final newline does not start another line; "\r\n" endings are accepted.
std::vector<std::string> split_lines(std::string_view text);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Decodes UTF-8 into code points. Invalid bytes map to U+FFFD one byte at
// a time, so every input decodes.
std::u32string utf8_to_u32(std::string_view text);

/// Extracts the items of a numbered list from free-form LLM output.
///
/// Recognizes "1.", "1)", "(1)" and "-", "*", "•" bullets at the start of a
/// line. Numbering, bullet and surrounding whitespace are stripped. Text
/// before the first item and non-item lines after it are ignored. Items
/// keep their order; an empty vector means no list was found.
std::vector<std::string> parse_numbered_list(std::string_view text);

}  // namespace hallucorrect
