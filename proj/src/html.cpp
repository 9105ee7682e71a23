#include "hallucorrect/html.h"

#include <algorithm>
#include <array>
#include <cctype>

#include "hallucorrect/text_util.h"

namespace hallucorrect {

namespace {

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

bool ieq(std::string_view a, std::string_view b) {
  return a.size() == b.size() && starts_with_ci(a, b);
}

std::size_t find_ci(std::string_view hay, std::string_view needle, std::size_t from) {
  if (needle.empty()) return from;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    if (starts_with_ci(hay.substr(i), needle)) return i;
  }
  return std::string_view::npos;
}

constexpr std::array<std::string_view, 15> kVoid{"area", "base", "br",   "col",  "embed",
                                                  "hr",   "img",  "input", "link", "meta",
                                                  "param", "source", "track", "wbr", "keygen"};

// Elements whose start tag implicitly closes an open <p>.
constexpr std::array<std::string_view, 27> kClosesP{
    "address", "article", "aside", "blockquote", "div", "dl",     "fieldset", "footer", "form",
    "h1",      "h2",      "h3",    "h4",         "h5",  "h6",     "header",   "hr",     "main",
    "nav",     "ol",      "p",     "pre",        "section", "table", "ul",    "figure", "menu"};

template <std::size_t N>
bool in(const std::array<std::string_view, N>& set, std::string_view tag) {
  return std::find(set.begin(), set.end(), tag) != set.end();
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

struct NamedEntity {
  std::string_view name;
  unsigned long cp;
};

constexpr std::array<NamedEntity, 24> kEntities{{
    {"amp", '&'},      {"lt", '<'},        {"gt", '>'},       {"quot", '"'},     {"apos", '\''},
    {"nbsp", 0xA0},    {"mdash", 0x2014},  {"ndash", 0x2013}, {"hellip", 0x2026}, {"rsquo", 0x2019},
    {"lsquo", 0x2018}, {"rdquo", 0x201D},  {"ldquo", 0x201C}, {"copy", 0xA9},     {"reg", 0xAE},
    {"trade", 0x2122}, {"bull", 0x2022},   {"middot", 0xB7},  {"laquo", 0xAB},    {"raquo", 0xBB},
    {"eacute", 0xE9},  {"euro", 0x20AC},   {"pound", 0xA3},   {"deg", 0xB0},
}};

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {
    root_.tag = "#document";
    stack_.push_back(&root_);
  }

  HtmlNode run() {
    while (pos_ < src_.size()) {
      if (src_[pos_] == '<') {
        parse_markup();
      } else {
        auto next = src_.find('<', pos_);
        if (next == std::string_view::npos) next = src_.size();
        add_text(decode_entities(src_.substr(pos_, next - pos_)));
        pos_ = next;
      }
    }
    return std::move(root_);
  }

 private:
  HtmlNode& top() { return *stack_.back(); }

  void add_text(std::string text) {
    if (text.empty()) return;
    auto& kids = top().children;
    if (!kids.empty() && kids.back().is_text()) {
      kids.back().text += text;
      return;
    }
    HtmlNode node;
    node.text = std::move(text);
    kids.push_back(std::move(node));
  }

  void skip_past(std::string_view terminator) {
    auto end = src_.find(terminator, pos_);
    pos_ = end == std::string_view::npos ? src_.size() : end + terminator.size();
  }

  void parse_markup() {
    auto rest = src_.substr(pos_);
    if (rest.substr(0, 4) == "<!--") {
      pos_ += 4;
      skip_past("-->");
      return;
    }
    if (rest.size() > 1 && (rest[1] == '!' || rest[1] == '?')) {
      skip_past(">");
      return;
    }
    if (rest.size() > 1 && rest[1] == '/') {
      std::size_t i = pos_ + 2;
      std::string name = read_name(i);
      pos_ = i;
      skip_past(">");
      if (!name.empty()) close(name);
      return;
    }
    if (rest.size() > 1 && std::isalpha(static_cast<unsigned char>(rest[1]))) {
      parse_open_tag();
      return;
    }
    add_text("<");
    ++pos_;
  }

  std::string read_name(std::size_t& i) {
    std::string name;
    while (i < src_.size() && !is_ws(src_[i]) && src_[i] != '>' && src_[i] != '/') {
      name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(src_[i]))));
      ++i;
    }
    return name;
  }

  void parse_open_tag() {
    std::size_t i = pos_ + 1;
    HtmlNode node;
    node.tag = read_name(i);
    bool self_closing = false;
    while (i < src_.size() && src_[i] != '>') {
      if (is_ws(src_[i])) {
        ++i;
        continue;
      }
      if (src_[i] == '/') {
        self_closing = true;
        ++i;
        continue;
      }
      self_closing = false;
      std::string key;
      while (i < src_.size() && !is_ws(src_[i]) && src_[i] != '=' && src_[i] != '>' && src_[i] != '/') {
        key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(src_[i]))));
        ++i;
      }
      while (i < src_.size() && is_ws(src_[i])) ++i;
      std::string value;
      if (i < src_.size() && src_[i] == '=') {
        ++i;
        while (i < src_.size() && is_ws(src_[i])) ++i;
        if (i < src_.size() && (src_[i] == '"' || src_[i] == '\'')) {
          char q = src_[i++];
          auto end = src_.find(q, i);
          if (end == std::string_view::npos) end = src_.size();
          value = decode_entities(src_.substr(i, end - i));
          i = std::min(end + 1, src_.size());
        } else {
          std::size_t start = i;
          while (i < src_.size() && !is_ws(src_[i]) && src_[i] != '>') ++i;
          value = decode_entities(src_.substr(start, i - start));
        }
      }
      if (!key.empty()) node.attrs.emplace_back(std::move(key), std::move(value));
    }
    pos_ = std::min(i + 1, src_.size());

    if (node.tag == "script" || node.tag == "style") {
      auto end = find_ci(src_, "</" + node.tag, pos_);
      pos_ = end == std::string_view::npos ? src_.size() : end;
      skip_past(">");
      top().children.push_back(std::move(node));
      return;
    }
    if (node.tag == "title" || node.tag == "textarea") {
      auto end = find_ci(src_, "</" + node.tag, pos_);
      if (end == std::string_view::npos) end = src_.size();
      HtmlNode text;
      text.text = decode_entities(src_.substr(pos_, end - pos_));
      node.children.push_back(std::move(text));
      pos_ = end;
      skip_past(">");
      top().children.push_back(std::move(node));
      return;
    }

    implicit_close(node.tag);
    bool is_void = in(kVoid, node.tag);
    top().children.push_back(std::move(node));
    if (!is_void && !self_closing) stack_.push_back(&top().children.back());
  }

  void implicit_close(const std::string& tag) {
    if (in(kClosesP, tag) && top().tag == "p") stack_.pop_back();
    auto pop_to = [&](std::initializer_list<std::string_view> targets,
                      std::initializer_list<std::string_view> barriers) {
      for (std::size_t d = stack_.size() - 1; d > 0; --d) {
        const auto& t = stack_[d]->tag;
        if (std::find(barriers.begin(), barriers.end(), t) != barriers.end()) return;
        if (std::find(targets.begin(), targets.end(), t) != targets.end()) {
          stack_.resize(d);
          return;
        }
      }
    };
    if (tag == "li") pop_to({"li"}, {"ul", "ol", "menu"});
    if (tag == "dt" || tag == "dd") pop_to({"dt", "dd"}, {"dl"});
    if (tag == "td" || tag == "th") pop_to({"td", "th"}, {"tr", "table"});
    if (tag == "tr") pop_to({"tr"}, {"table"});
    if (tag == "option") pop_to({"option"}, {"select"});
  }

  void close(const std::string& name) {
    for (std::size_t d = stack_.size() - 1; d > 0; --d) {
      if (stack_[d]->tag == name) {
        stack_.resize(d);
        return;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  HtmlNode root_;
  std::vector<HtmlNode*> stack_;
};

void collect_text(const HtmlNode& node, std::string& out) {
  if (node.is_text()) {
    out += node.text;
    return;
  }
  if (node.tag == "script" || node.tag == "style") return;
  if (node.tag == "br") out += ' ';
  for (const auto& child : node.children) collect_text(child, out);
}

}  // namespace

std::optional<std::string_view> HtmlNode::attr(std::string_view name) const {
  for (const auto& [k, v] : attrs) {
    if (ieq(k, name)) return std::string_view(v);
  }
  return std::nullopt;
}

bool HtmlNode::has_class(std::string_view cls) const {
  auto c = attr("class");
  if (!c) return false;
  for (const auto& token : split_words(*c)) {
    if (token == cls) return true;
  }
  return false;
}

HtmlNode parse_html(std::string_view html) { return Parser(html).run(); }

std::string decode_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out.push_back(text[i++]);
      continue;
    }
    auto semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back(text[i++]);
      continue;
    }
    auto body = text.substr(i + 1, semi - i - 1);
    bool done = false;
    if (!body.empty() && body[0] == '#') {
      unsigned long cp = 0;
      bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
      auto digits = body.substr(hex ? 2 : 1);
      bool ok = !digits.empty();
      for (char c : digits) {
        int v = -1;
        if (c >= '0' && c <= '9') v = c - '0';
        if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
        if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
        if (v < 0) {
          ok = false;
          break;
        }
        cp = cp * (hex ? 16 : 10) + static_cast<unsigned long>(v);
        if (cp > 0x10FFFF) cp = 0x110000;
      }
      if (ok) {
        append_utf8(out, cp);
        done = true;
      }
    } else {
      for (const auto& e : kEntities) {
        if (e.name == body) {
          append_utf8(out, e.cp);
          done = true;
          break;
        }
      }
    }
    if (done) {
      i = semi + 1;
    } else {
      out.push_back(text[i++]);
    }
  }
  return out;
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    bool space = is_ws(static_cast<char>(c)) || c == '\v';
    // U+00A0 NO-BREAK SPACE is 0xC2 0xA0 in UTF-8.
    if (c == 0xC2 && i + 1 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0xA0) {
      space = true;
      ++i;
    }
    if (space) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(static_cast<char>(c));
  }
  return out;
}

std::string text_content(const HtmlNode& node) {
  std::string raw;
  collect_text(node, raw);
  return collapse_whitespace(raw);
}

void find_all(const HtmlNode& root, const std::function<bool(const HtmlNode&)>& pred,
              std::vector<const HtmlNode*>& out) {
  if (!root.is_text() && pred(root)) out.push_back(&root);
  for (const auto& child : root.children) find_all(child, pred, out);
}

const HtmlNode* find_first(const HtmlNode& root, const std::function<bool(const HtmlNode&)>& pred) {
  if (!root.is_text() && pred(root)) return &root;
  for (const auto& child : root.children) {
    if (auto* hit = find_first(child, pred)) return hit;
  }
  return nullptr;
}

}  // namespace hallucorrect
