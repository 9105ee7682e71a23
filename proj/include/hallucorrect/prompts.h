#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace hallucorrect {

enum class TemplateId {
  kCoveGenQuestions,
  kCoveAnswer,
  kCoveRefine,
  kRarrGenQuestions,
  kRarrAnswer,
  kRarrRefine,
  kGevalFactuality,
  kGevalRelevance,
  kGevalOverall,
};

inline constexpr std::array<TemplateId, 9> kAllTemplates{
    TemplateId::kCoveGenQuestions, TemplateId::kCoveAnswer,      TemplateId::kCoveRefine,
    TemplateId::kRarrGenQuestions, TemplateId::kRarrAnswer,      TemplateId::kRarrRefine,
    TemplateId::kGevalFactuality,  TemplateId::kGevalRelevance,  TemplateId::kGevalOverall,
};

std::string to_string(TemplateId id);
TemplateId parse_template_id(const std::string& s);

/// A prompt body with `{name}` placeholders and the set of names it binds.
/// Bodies are frozen at build time from the files under prompts/.
struct PromptTemplate {
  TemplateId id;
  std::string_view body;
  std::vector<std::string> bindings;
};

const PromptTemplate& get_template(TemplateId id);

// Names of every `{identifier}` placeholder in `body`, in order of first use.
std::vector<std::string> placeholders(std::string_view body);

using Bindings = std::map<std::string, std::string, std::less<>>;

// Single-pass substitution: values are inserted verbatim and never rescanned.
// Unused bindings are ignored. Throws Error{kMissingBinding} naming the
// first placeholder without a value.
std::string render(TemplateId id, const Bindings& bindings);
std::string render_body(std::string_view body, const Bindings& bindings);

}  // namespace hallucorrect
