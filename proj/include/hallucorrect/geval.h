#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "hallucorrect/llm.h"
#include "hallucorrect/types.h"

namespace hallucorrect {

enum class GevalAspect { kFactuality, kRelevance, kOverall };

std::string to_string(GevalAspect aspect);
GevalAspect parse_geval_aspect(const std::string& s);

// Reads an integer 1..10 from a judge reply: a "Score: n" line wins, then
// a JSON "score" field, then a reply that is just a number, then the last
// integer in the text. Out-of-range values count as unparseable.
std::optional<int> parse_judge_score(std::string_view reply);

// (score - 1) / 9
double normalize_judge_score(int score);

struct JudgeOutcome {
  double score = 0.0;  // normalised to [0, 1]
  int raw = 0;
  int calls = 0;
};

/// LLM-as-judge with chain-of-thought rubric prompts, one per aspect.
class GevalJudge {
 public:
  GevalJudge(std::shared_ptr<LlmGateway> gateway, std::string backend_id, int max_output_length = 512);

  // Renders the aspect prompt with `input_text` as the input and
  // `actual_output` as the output under review. A reply without a score is
  // retried once with a reminder; a second miss raises Error{kParse}.
  JudgeOutcome judge(GevalAspect aspect, const std::string& input_text, const std::string& actual_output);
  double geval(GevalAspect aspect, const std::string& input_text, const std::string& actual_output) {
    return judge(aspect, input_text, actual_output).score;
  }
  GevalTriple all_aspects(const std::string& input_text, const std::string& actual_output);

 private:
  std::shared_ptr<LlmGateway> gateway_;
  std::string backend_id_;
  int max_output_length_;
};

}  // namespace hallucorrect
