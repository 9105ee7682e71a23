#include "hallucorrect/text_util.h"

#include <cctype>

namespace hallucorrect {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Consumes one numbering marker ("12.", "3)", "(4)") plus the whitespace after
// it. Returns the remaining text, or npos-sized view on no match.
bool strip_number(std::string_view& s) {
  std::size_t i = 0;
  bool paren = false;
  if (i < s.size() && s[i] == '(') {
    paren = true;
    ++i;
  }
  std::size_t digits = 0;
  while (i < s.size() && is_digit(s[i]) && digits < 3) {
    ++i;
    ++digits;
  }
  if (digits == 0 || i >= s.size()) return false;
  if (paren) {
    if (s[i] != ')') return false;
  } else if (s[i] != '.' && s[i] != ')') {
    return false;
  }
  ++i;
  // "1.5 million" is a number, not a list marker.
  if (i < s.size() && !is_space(s[i])) return false;
  while (i < s.size() && is_space(s[i])) ++i;
  s.remove_prefix(i);
  return true;
}

bool strip_bullet(std::string_view& s) {
  static constexpr std::string_view kBullets[] = {"-", "*", "•", "+"};
  for (auto b : kBullets) {
    if (s.size() > b.size() && s.substr(0, b.size()) == b && is_space(s[b.size()])) {
      s.remove_prefix(b.size());
      while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
      return true;
    }
  }
  return false;
}

}  // namespace

std::string trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.emplace_back(line);
    start = end + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::u32string utf8_to_u32(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    int len = 0;
    char32_t cp = 0;
    if (c < 0x80) {
      len = 1;
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    }
    bool ok = len > 0 && i + len <= text.size();
    for (int k = 1; ok && k < len; ++k) {
      auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      out.push_back(U'�');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::vector<std::string> parse_numbered_list(std::string_view text) {
  std::vector<std::string> numbered;
  std::vector<std::string> bulleted;
  for (const auto& raw : split_lines(text)) {
    std::string line = trim(raw);
    std::string_view rest = line;
    bool bullet = strip_bullet(rest);
    bool number = strip_number(rest);
    if (!bullet && !number) continue;
    while (strip_number(rest)) {
    }
    auto item = trim(rest);
    if (item.empty()) continue;
    (number ? numbered : bulleted).push_back(std::move(item));
  }
  return numbered.empty() ? bulleted : numbered;
}

}  // namespace hallucorrect
