#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hallucorrect {

// Minimal tolerant HTML tree. Text nodes have an empty tag. Script and
// style bodies are dropped while parsing; comments and doctypes are skipped.
struct HtmlNode {
  std::string tag;
  std::string text;
  std::vector<std::pair<std::string, std::string>> attrs;
  std::vector<HtmlNode> children;

  bool is_text() const { return tag.empty(); }
  std::optional<std::string_view> attr(std::string_view name) const;
  bool has_class(std::string_view cls) const;
};

// Root is a synthetic "#document" element. Never throws.
HtmlNode parse_html(std::string_view html);

std::string decode_entities(std::string_view text);

// Concatenated descendant text with whitespace runs collapsed to one space.
std::string text_content(const HtmlNode& node);

void find_all(const HtmlNode& root, const std::function<bool(const HtmlNode&)>& pred,
              std::vector<const HtmlNode*>& out);
const HtmlNode* find_first(const HtmlNode& root, const std::function<bool(const HtmlNode&)>& pred);

// Collapses whitespace runs (including non-breaking spaces) and trims.
std::string collapse_whitespace(std::string_view text);

}  // namespace hallucorrect
