#include "hallucorrect/geval.h"

#include <regex>

#include <nlohmann/json.hpp>

#include "hallucorrect/errors.h"
#include "hallucorrect/prompts.h"
#include "hallucorrect/text_util.h"

namespace hallucorrect {

namespace {

constexpr std::string_view kScoreReminder =
    "\n\nYour previous reply had no score. Reply with only the line \"Score: <integer from 1 to 10>\".";

TemplateId template_for(GevalAspect aspect) {
  switch (aspect) {
    case GevalAspect::kFactuality:
      return TemplateId::kGevalFactuality;
    case GevalAspect::kRelevance:
      return TemplateId::kGevalRelevance;
    case GevalAspect::kOverall:
      return TemplateId::kGevalOverall;
  }
  return TemplateId::kGevalOverall;
}

std::optional<int> in_range(long long v) {
  if (v < 1 || v > 10) return std::nullopt;
  return static_cast<int>(v);
}

}  // namespace

std::string to_string(GevalAspect aspect) {
  switch (aspect) {
    case GevalAspect::kFactuality:
      return "factuality";
    case GevalAspect::kRelevance:
      return "relevance";
    case GevalAspect::kOverall:
      return "overall";
  }
  return "overall";
}

GevalAspect parse_geval_aspect(const std::string& s) {
  auto v = to_lower_ascii(trim(s));
  if (v == "factuality" || v == "factual") return GevalAspect::kFactuality;
  if (v == "relevance" || v == "relev") return GevalAspect::kRelevance;
  if (v == "overall") return GevalAspect::kOverall;
  throw Error(ErrorCode::kInvalidArgument, "unknown G-Eval aspect '" + s + "'");
}

std::optional<int> parse_judge_score(std::string_view reply) {
  const std::string text(reply);
  static const std::regex marker(R"([Ss]core\s*[:=]\s*\**\s*(\d+)(?:\s*/\s*10)?)");
  std::optional<long long> last_marked;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), marker); it != std::sregex_iterator(); ++it) {
    last_marked = std::stoll((*it)[1].str());
  }
  if (last_marked) return in_range(*last_marked);

  auto first_brace = text.find('{');
  auto last_brace = text.rfind('}');
  if (first_brace != std::string::npos && last_brace != std::string::npos && last_brace > first_brace) {
    auto body = nlohmann::json::parse(text.substr(first_brace, last_brace - first_brace + 1), nullptr, false);
    if (body.is_object() && body.contains("score") && body["score"].is_number()) {
      double v = body["score"].get<double>();
      if (v == static_cast<double>(static_cast<long long>(v))) return in_range(static_cast<long long>(v));
      return std::nullopt;
    }
  }

  static const std::regex integer(R"((^|[^\d.])(\d+)(?![\d.]\d))");
  std::optional<long long> last;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), integer); it != std::sregex_iterator(); ++it) {
    last = std::stoll((*it)[2].str());
  }
  if (last) return in_range(*last);
  return std::nullopt;
}

double normalize_judge_score(int score) {
  if (score < 1 || score > 10) throw Error(ErrorCode::kInvalidArgument, "judge score outside 1..10");
  return (score - 1) / 9.0;
}

GevalJudge::GevalJudge(std::shared_ptr<LlmGateway> gateway, std::string backend_id, int max_output_length)
    : gateway_(std::move(gateway)), backend_id_(std::move(backend_id)), max_output_length_(max_output_length) {}

JudgeOutcome GevalJudge::judge(GevalAspect aspect, const std::string& input_text, const std::string& actual_output) {
  auto prompt = render(template_for(aspect), {{"input", input_text}, {"actual_output", actual_output}});
  JudgeOutcome out;
  auto reply = gateway_->complete({backend_id_, prompt, 0.0, max_output_length_}).text;
  out.calls = 1;
  auto score = parse_judge_score(reply);
  if (!score) {
    auto retry = prompt + "\n\n" + reply + std::string(kScoreReminder);
    reply = gateway_->complete({backend_id_, retry, 0.0, max_output_length_}).text;
    out.calls = 2;
    score = parse_judge_score(reply);
  }
  if (!score) throw Error(ErrorCode::kParse, "judge gave no score for " + to_string(aspect));
  out.raw = *score;
  out.score = normalize_judge_score(*score);
  return out;
}

GevalTriple GevalJudge::all_aspects(const std::string& input_text, const std::string& actual_output) {
  GevalTriple t;
  t.overall = geval(GevalAspect::kOverall, input_text, actual_output);
  t.factuality = geval(GevalAspect::kFactuality, input_text, actual_output);
  t.relevance = geval(GevalAspect::kRelevance, input_text, actual_output);
  return t;
}

}  // namespace hallucorrect
