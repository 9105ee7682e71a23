#include "hallucorrect/prompts.h"

#include "hallucorrect/errors.h"

namespace hallucorrect {

namespace {

// Generated from prompts/*.txt at configure time.
#include "prompt_bodies.inc"

bool ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

// Finds the next `{identifier}` at or after `from`. Returns npos if none.
std::size_t next_placeholder(std::string_view body, std::size_t from, std::size_t& end) {
  for (auto open = body.find('{', from); open != std::string_view::npos; open = body.find('{', open + 1)) {
    std::size_t i = open + 1;
    while (i < body.size() && ident_char(body[i])) ++i;
    if (i > open + 1 && i < body.size() && body[i] == '}') {
      end = i + 1;
      return open;
    }
  }
  return std::string_view::npos;
}

PromptTemplate make(TemplateId id, std::string_view body) {
  return PromptTemplate{id, body, placeholders(body)};
}

}  // namespace

std::string to_string(TemplateId id) {
  switch (id) {
    case TemplateId::kCoveGenQuestions: return "cove_gen_questions";
    case TemplateId::kCoveAnswer: return "cove_answer";
    case TemplateId::kCoveRefine: return "cove_refine";
    case TemplateId::kRarrGenQuestions: return "rarr_gen_questions";
    case TemplateId::kRarrAnswer: return "rarr_answer";
    case TemplateId::kRarrRefine: return "rarr_refine";
    case TemplateId::kGevalFactuality: return "geval_factuality";
    case TemplateId::kGevalRelevance: return "geval_relevance";
    case TemplateId::kGevalOverall: return "geval_overall";
  }
  return "";
}

TemplateId parse_template_id(const std::string& s) {
  for (auto id : kAllTemplates) {
    if (to_string(id) == s) return id;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown template id '" + s + "'");
}

const PromptTemplate& get_template(TemplateId id) {
  static const std::array<PromptTemplate, 9> kTemplates{
      make(TemplateId::kCoveGenQuestions, kCoveGenQuestionsBody),
      make(TemplateId::kCoveAnswer, kCoveAnswerBody),
      make(TemplateId::kCoveRefine, kCoveRefineBody),
      make(TemplateId::kRarrGenQuestions, kRarrGenQuestionsBody),
      make(TemplateId::kRarrAnswer, kRarrAnswerBody),
      make(TemplateId::kRarrRefine, kRarrRefineBody),
      make(TemplateId::kGevalFactuality, kGevalFactualityBody),
      make(TemplateId::kGevalRelevance, kGevalRelevanceBody),
      make(TemplateId::kGevalOverall, kGevalOverallBody),
  };
  return kTemplates[static_cast<std::size_t>(id)];
}

std::vector<std::string> placeholders(std::string_view body) {
  std::vector<std::string> out;
  std::size_t end = 0;
  for (auto pos = next_placeholder(body, 0, end); pos != std::string_view::npos;
       pos = next_placeholder(body, end, end)) {
    std::string name(body.substr(pos + 1, end - pos - 2));
    bool seen = false;
    for (const auto& n : out) seen = seen || n == name;
    if (!seen) out.push_back(std::move(name));
  }
  return out;
}

std::string render_body(std::string_view body, const Bindings& bindings) {
  std::string out;
  out.reserve(body.size());
  std::size_t cursor = 0;
  std::size_t end = 0;
  for (auto pos = next_placeholder(body, 0, end); pos != std::string_view::npos;
       pos = next_placeholder(body, end, end)) {
    auto name = body.substr(pos + 1, end - pos - 2);
    auto it = bindings.find(name);
    if (it == bindings.end()) {
      throw Error(ErrorCode::kMissingBinding, "missing binding '" + std::string(name) + "'");
    }
    out.append(body.substr(cursor, pos - cursor));
    out.append(it->second);
    cursor = end;
  }
  out.append(body.substr(cursor));
  return out;
}

std::string render(TemplateId id, const Bindings& bindings) {
  return render_body(get_template(id).body, bindings);
}

}  // namespace hallucorrect
