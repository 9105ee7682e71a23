#include "hallucorrect/html_extract.h"

#include <algorithm>
#include <array>
#include <vector>

#include "hallucorrect/html.h"
#include "hallucorrect/text_util.h"

namespace hallucorrect {

namespace {

constexpr std::array<std::string_view, 16> kSkipTags{
    "script", "style",  "noscript", "template", "svg",    "nav",  "header", "footer",
    "aside",  "form",   "button",   "select",   "iframe", "menu", "head",   "canvas"};

constexpr std::array<std::string_view, 26> kBlockTags{
    "p",  "div", "h1",  "h2",      "h3",         "h4",      "h5",     "h6",       "li",
    "ul", "ol",  "br",  "section", "article",    "main",    "blockquote", "pre",  "table",
    "tr", "td",  "th",  "dd",      "dt",         "figcaption", "hr",  "body"};

constexpr std::array<std::string_view, 24> kBoilerplateHints{
    "nav",     "menu",      "footer",  "sidebar", "cookie", "banner",  "breadcrumb", "share",
    "social",  "related",   "comment", "advert",  "promo",  "newsletter", "subscribe", "popup",
    "modal",   "masthead",  "toolbar", "signup",  "paywall", "recommend", "skip-link", "sponsor"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view v) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

bool looks_like_boilerplate(const HtmlNode& node) {
  std::string names;
  if (auto c = node.attr("class")) names += to_lower_ascii(*c) + " ";
  if (auto id = node.attr("id")) names += to_lower_ascii(*id);
  if (auto role = node.attr("role")) {
    auto r = to_lower_ascii(*role);
    if (r == "navigation" || r == "banner" || r == "contentinfo" || r == "complementary") return true;
  }
  if (node.attr("hidden") || node.attr("aria-hidden") == std::optional<std::string_view>("true")) return true;
  if (names.empty()) return false;
  for (auto hint : kBoilerplateHints) {
    if (names.find(hint) != std::string::npos) return true;
  }
  return false;
}

struct Block {
  std::string text;
  std::size_t link_chars = 0;
};

class Collector {
 public:
  void walk(const HtmlNode& node, bool in_link, bool is_root) {
    if (node.is_text()) {
      current_.text += node.text;
      if (in_link) current_.link_chars += collapse_whitespace(node.text).size();
      return;
    }
    if (contains(kSkipTags, node.tag)) return;
    if (!is_root && looks_like_boilerplate(node)) return;
    bool block = contains(kBlockTags, node.tag);
    if (block) flush();
    bool link = in_link || node.tag == "a";
    for (const auto& child : node.children) walk(child, link, false);
    if (block) flush();
  }

  std::vector<Block> finish() {
    flush();
    return std::move(blocks_);
  }

 private:
  void flush() {
    auto text = collapse_whitespace(current_.text);
    if (!text.empty()) blocks_.push_back(Block{std::move(text), current_.link_chars});
    current_ = Block{};
  }

  Block current_;
  std::vector<Block> blocks_;
};

std::size_t text_size(const HtmlNode& node) { return text_content(node).size(); }

const HtmlNode* content_root(const HtmlNode& doc) {
  std::vector<const HtmlNode*> articles;
  find_all(doc, [](const HtmlNode& n) { return n.tag == "article"; }, articles);
  const HtmlNode* best = nullptr;
  std::size_t best_size = 0;
  for (const auto* a : articles) {
    auto size = text_size(*a);
    if (size > best_size) {
      best = a;
      best_size = size;
    }
  }
  if (best) return best;
  if (auto* main = find_first(doc, [](const HtmlNode& n) {
        return n.tag == "main" || n.attr("role") == std::optional<std::string_view>("main");
      })) {
    return main;
  }
  if (auto* body = find_first(doc, [](const HtmlNode& n) { return n.tag == "body"; })) return body;
  return &doc;
}

}  // namespace

std::string extract_article_text(std::string_view html) {
  auto doc = parse_html(html);
  Collector collector;
  collector.walk(*content_root(doc), false, true);
  std::vector<std::string> lines;
  for (auto& block : collector.finish()) {
    if (block.link_chars * 2 > block.text.size()) continue;
    lines.push_back(std::move(block.text));
  }
  return join(lines, "\n");
}

std::string extract_title(std::string_view html) {
  auto doc = parse_html(html);
  if (auto* title = find_first(doc, [](const HtmlNode& n) { return n.tag == "title"; })) {
    return text_content(*title);
  }
  if (auto* h1 = find_first(doc, [](const HtmlNode& n) { return n.tag == "h1"; })) return text_content(*h1);
  return {};
}

}  // namespace hallucorrect
