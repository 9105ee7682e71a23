#include "hallucorrect/pipeline.h"

#include <chrono>
#include <ctime>
#include <future>
#include <regex>

#include <spdlog/spdlog.h>

#include "hallucorrect/errors.h"
#include "hallucorrect/prompts.h"
#include "hallucorrect/serialize.h"
#include "hallucorrect/text_util.h"
#include "hallucorrect/validate.h"

namespace hallucorrect {

namespace {

constexpr std::string_view kCoveListReminder = "Output a numbered list of verification questions.";
constexpr std::string_view kGoogledPrimer = "\n1. I googled:";
constexpr std::string_view kTherefore = "Therefore:";
constexpr std::string_view kMyFix = "My fix:";

std::size_t find_ci(std::string_view haystack, std::string_view needle) {
  auto lower = to_lower_ascii(haystack);
  return lower.find(to_lower_ascii(needle));
}

// Few-shot continuations often run on into a made-up next example.
std::string cut_at_next_example(std::string_view text) {
  auto pos = find_ci(text, "You said:");
  if (pos == std::string::npos) return std::string(text);
  auto head = std::string(text.substr(0, pos));
  // Drop the dangling "1. " that introduced the next example.
  static const std::regex dangling(R"((\n|^)\s*\d+[.)]\s*$)");
  return std::regex_replace(head, dangling, "");
}

std::string strip_trailing_marker(std::string text) {
  static const std::regex marker(R"(\s*\d+[.)]\s*$)");
  return trim(std::regex_replace(text, marker, ""));
}

std::string first_paragraph(std::string_view text) {
  auto t = trim(text);
  auto pos = t.find("\n\n");
  return pos == std::string::npos ? t : trim(t.substr(0, pos));
}

void append(std::vector<StageTrace>* trace, StageTrace e) {
  if (trace) trace->push_back(std::move(e));
}

}  // namespace

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  auto secs = std::chrono::system_clock::to_time_t(now);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

std::string format_qa_pairs(const std::vector<VerificationQuestion>& questions,
                            const std::vector<VerifiedAnswer>& answers) {
  if (questions.size() != answers.size()) {
    throw Error(ErrorCode::kInvalidArgument, "questions and answers differ in number");
  }
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    auto n = std::to_string(questions[i].index);
    lines.push_back("Q" + n + ": " + questions[i].text);
    lines.push_back("A" + n + ": " + answers[i].answer_text);
  }
  return join(lines, "\n");
}

Agreement classify_agreement(std::string_view verdict) {
  auto v = to_lower_ascii(verdict);
  for (const char* neg : {"disagree", "not agree", "doesn't agree", "doesn’t agree", "does not agree"}) {
    if (v.find(neg) != std::string::npos) return Agreement::kDisagrees;
  }
  if (v.find("agree") != std::string::npos) return Agreement::kAgrees;
  return Agreement::kIrrelevant;
}

std::vector<std::string> parse_googled_questions(std::string_view text) {
  std::vector<std::string> out;
  for (auto& item : parse_numbered_list(cut_at_next_example(text))) {
    auto pos = find_ci(item, "I googled:");
    if (pos == 0) item = trim(std::string_view(item).substr(10));
    if (!item.empty()) out.push_back(std::move(item));
  }
  return out;
}

CorrectionPipeline::CorrectionPipeline(std::shared_ptr<LlmGateway> gateway,
                                       std::shared_ptr<EvidenceRetriever> retriever, TraceClock clock)
    : gateway_(std::move(gateway)), retriever_(std::move(retriever)), clock_(std::move(clock)) {
  if (!gateway_) throw Error(ErrorCode::kConfig, "pipeline needs an LLM gateway");
}

std::string CorrectionPipeline::complete(const std::string& prompt, const PipelineConfig& config) {
  CompletionRequest req{config.llm_backend, prompt, config.temperature, config.max_output_length};
  return gateway_->complete(req).text;
}

StageTrace CorrectionPipeline::entry(Stage stage, std::string prompt, std::string raw, nlohmann::json parsed) const {
  StageTrace t;
  t.stage = stage;
  t.prompt = std::move(prompt);
  t.raw_output = std::move(raw);
  t.parsed = std::move(parsed);
  t.timestamp = clock_ ? clock_() : std::string();
  return t;
}

std::string CorrectionPipeline::original_question(const SummaryRecord& record, const PipelineConfig& config) const {
  std::string q(kSummarizeInstruction);
  if (config.evidence_source == SourceKind::kGoldArticle && record.source_article &&
      !trim(*record.source_article).empty()) {
    q += "\n\nArticle: " + *record.source_article;
  }
  return q;
}

std::vector<VerificationQuestion> CorrectionPipeline::finish_questions(std::vector<std::string> items,
                                                                       const PipelineConfig& config,
                                                                       StageTrace& last) {
  auto limit = static_cast<std::size_t>(std::max(config.max_questions, 1));
  if (items.size() > limit) {
    last.notes.push_back("truncated " + std::to_string(items.size()) + " questions to " + std::to_string(limit));
    items.resize(limit);
  }
  std::vector<VerificationQuestion> out;
  for (std::size_t i = 0; i < items.size(); ++i) out.push_back({static_cast<int>(i) + 1, std::move(items[i])});
  last.parsed = out;
  return out;
}

std::vector<VerificationQuestion> CorrectionPipeline::generate_questions_cove(const SummaryRecord& record,
                                                                              const PipelineConfig& config,
                                                                              std::vector<StageTrace>* trace) {
  auto prompt = render(TemplateId::kCoveGenQuestions, {{"original_question", original_question(record, config)},
                                                       {"baseline_response", record.input_summary}});
  auto raw = complete(prompt, config);
  auto items = parse_numbered_list(raw);
  auto first = entry(Stage::kGenerateQuestions, prompt, raw, nlohmann::json::array());
  if (!items.empty()) {
    auto out = finish_questions(std::move(items), config, first);
    append(trace, std::move(first));
    return out;
  }
  first.notes.emplace_back("no numbered questions; retrying with a reminder");
  append(trace, std::move(first));

  auto retry_prompt = prompt + "\n\n" + std::string(kCoveListReminder);
  auto retry_raw = complete(retry_prompt, config);
  auto second = entry(Stage::kGenerateQuestions, retry_prompt, retry_raw, nlohmann::json::array());
  items = parse_numbered_list(retry_raw);
  if (items.empty()) {
    second.notes.emplace_back("no numbered questions after retry");
    append(trace, std::move(second));
    throw Error(ErrorCode::kParse, "no verification questions in model output");
  }
  auto out = finish_questions(std::move(items), config, second);
  append(trace, std::move(second));
  return out;
}

std::vector<VerificationQuestion> CorrectionPipeline::generate_questions_rarr(const SummaryRecord& record,
                                                                              const PipelineConfig& config,
                                                                              std::vector<StageTrace>* trace) {
  auto prompt = render(TemplateId::kRarrGenQuestions, {{"claim", record.input_summary}});
  auto raw = complete(prompt, config);
  auto items = parse_googled_questions(raw);
  auto first = entry(Stage::kGenerateQuestions, prompt, raw, nlohmann::json::array());
  if (!items.empty()) {
    auto out = finish_questions(std::move(items), config, first);
    append(trace, std::move(first));
    return out;
  }
  first.notes.emplace_back("no questions; retrying with a list primer");
  append(trace, std::move(first));

  auto retry_prompt = prompt + std::string(kGoogledPrimer);
  auto retry_raw = complete(retry_prompt, config);
  auto second = entry(Stage::kGenerateQuestions, retry_prompt, retry_raw, nlohmann::json::array());
  items = parse_googled_questions(std::string(kGoogledPrimer) + retry_raw);
  if (items.empty()) {
    second.notes.emplace_back("no questions after retry");
    append(trace, std::move(second));
    throw Error(ErrorCode::kParse, "no verification questions in model output");
  }
  auto out = finish_questions(std::move(items), config, second);
  append(trace, std::move(second));
  return out;
}

VerifiedAnswer CorrectionPipeline::answer_question_cove(const VerificationQuestion& question,
                                                        const EvidenceBundle& evidence, const PipelineConfig& config,
                                                        std::vector<StageTrace>* trace) {
  auto prompt = render(TemplateId::kCoveAnswer,
                       {{"search_result", evidence.concatenated}, {"verification_question", question.text}});
  auto raw = complete(prompt, config);
  VerifiedAnswer answer{question.index, trim(raw), std::nullopt, std::nullopt};
  append(trace, entry(Stage::kAnswer, prompt, raw, answer));
  return answer;
}

VerifiedAnswer CorrectionPipeline::answer_question_rarr(const std::string& claim, const VerificationQuestion& question,
                                                        const EvidenceBundle& evidence, const PipelineConfig& config,
                                                        std::vector<StageTrace>* trace) {
  auto prompt = render(TemplateId::kRarrAnswer,
                       {{"claim", claim}, {"query", question.text}, {"evidence", evidence.concatenated}});
  auto raw = complete(prompt, config);
  auto body = cut_at_next_example(raw);

  VerifiedAnswer answer{question.index, trim(body), Agreement::kIrrelevant, std::nullopt};
  auto first = entry(Stage::kAnswer, prompt, raw, nullptr);
  auto pos = find_ci(body, kTherefore);
  if (pos != std::string::npos) {
    answer.reasoning = strip_trailing_marker(body.substr(0, pos));
    answer.agreement = classify_agreement(first_paragraph(body.substr(pos + kTherefore.size())));
    first.parsed = answer;
    append(trace, std::move(first));
    return answer;
  }
  first.notes.emplace_back("no verdict line; retrying with a verdict primer");
  append(trace, std::move(first));

  auto retry_prompt = prompt + body + "\n5. " + std::string(kTherefore);
  auto retry_raw = complete(retry_prompt, config);
  auto verdict = first_paragraph(cut_at_next_example(retry_raw));
  answer.reasoning = strip_trailing_marker(body);
  auto second = entry(Stage::kAnswer, retry_prompt, retry_raw, nullptr);
  if (verdict.empty()) {
    second.notes.emplace_back("warning: no verdict after retry; treated as irrelevant");
  } else {
    answer.agreement = classify_agreement(verdict);
    answer.answer_text = trim(body + "\n5. " + std::string(kTherefore) + " " + verdict);
  }
  second.parsed = answer;
  append(trace, std::move(second));
  return answer;
}

RefinedResponse CorrectionPipeline::refine_cove(const SummaryRecord& record,
                                                const std::vector<VerificationQuestion>& questions,
                                                const std::vector<VerifiedAnswer>& answers,
                                                const PipelineConfig& config, std::vector<StageTrace>* trace) {
  if (questions.empty()) throw Error(ErrorCode::kInvalidArgument, "refinement needs at least one answered question");
  auto prompt = render(TemplateId::kCoveRefine, {{"original_question", original_question(record, config)},
                                                 {"baseline_response", record.input_summary},
                                                 {"verification_answers", format_qa_pairs(questions, answers)}});
  auto raw = complete(prompt, config);
  RefinedResponse out;
  out.system = System::kCove;
  out.text = trim(raw);
  append(trace, entry(Stage::kRefine, prompt, raw, out.text));
  if (out.text.empty()) throw Error(ErrorCode::kParse, "empty refined response");
  return out;
}

RefinedResponse CorrectionPipeline::refine_rarr(const SummaryRecord& record,
                                                const std::vector<QuestionOutcome>& outcomes,
                                                const PipelineConfig& config, std::vector<StageTrace>* trace) {
  if (outcomes.empty()) throw Error(ErrorCode::kInvalidArgument, "refinement needs at least one answered question");
  RefinedResponse out;
  out.system = System::kRarr;
  std::string current = record.input_summary;
  for (const auto& o : outcomes) {
    if (o.answer.agreement != Agreement::kDisagrees) continue;
    auto prompt = render(TemplateId::kRarrRefine,
                         {{"claim", current}, {"query", o.question.text}, {"evidence", o.evidence.concatenated}});
    auto raw = complete(prompt, config);
    auto body = cut_at_next_example(raw);
    auto first = entry(Stage::kRefine, prompt, raw, nullptr);

    std::string fix;
    auto pos = find_ci(body, kMyFix);
    if (pos != std::string::npos) fix = first_paragraph(body.substr(pos + kMyFix.size()));
    if (!fix.empty()) {
      first.parsed = {{"question_index", o.question.index}, {"fix", fix}};
      append(trace, std::move(first));
      current = fix;
      continue;
    }
    first.notes.emplace_back("no fix line; retrying with a fix primer");
    append(trace, std::move(first));

    auto retry_prompt = prompt + body + "\n5. " + std::string(kMyFix);
    auto retry_raw = complete(retry_prompt, config);
    fix = first_paragraph(cut_at_next_example(retry_raw));
    auto second = entry(Stage::kRefine, retry_prompt, retry_raw, nullptr);
    if (fix.empty()) {
      second.notes.emplace_back("warning: no fix after retry; edit skipped");
      second.parsed = {{"question_index", o.question.index}, {"fix", nullptr}};
    } else {
      second.parsed = {{"question_index", o.question.index}, {"fix", fix}};
      current = fix;
    }
    append(trace, std::move(second));
  }
  out.text = std::move(current);
  return out;
}

RefinedResponse CorrectionPipeline::run_pipeline(const SummaryRecord& record, const PipelineConfig& config) {
  auto problems = validate(record);
  auto config_problems = validate(config);
  problems.insert(problems.end(), config_problems.begin(), config_problems.end());
  if (!problems.empty()) throw Error(ErrorCode::kInvalidArgument, join(problems, "; "));
  if (config.evidence_source != SourceKind::kInternal && !retriever_) {
    throw Error(ErrorCode::kConfig, "evidence source needs a retriever");
  }

  std::vector<StageTrace> trace;
  const bool cove = config.system == System::kCove;
  auto questions =
      cove ? generate_questions_cove(record, config, &trace) : generate_questions_rarr(record, config, &trace);

  struct PerQuestion {
    QuestionOutcome outcome;
    std::vector<StageTrace> retrieve;
    std::vector<StageTrace> answer;
  };
  auto work = [&](const VerificationQuestion& q) {
    PerQuestion pq;
    pq.outcome.question = q;
    if (config.evidence_source == SourceKind::kInternal) {
      pq.outcome.evidence = EvidenceBundle{};
    } else {
      pq.outcome.evidence = retriever_->build_evidence(q.text, record, config);
    }
    auto r = entry(Stage::kRetrieve, q.text, pq.outcome.evidence.concatenated, pq.outcome.evidence);
    r.notes = pq.outcome.evidence.notes;
    pq.retrieve.push_back(std::move(r));
    pq.outcome.answer = cove ? answer_question_cove(q, pq.outcome.evidence, config, &pq.answer)
                             : answer_question_rarr(record.input_summary, q, pq.outcome.evidence, config, &pq.answer);
    return pq;
  };

  std::vector<std::future<PerQuestion>> pending;
  for (const auto& q : questions) pending.push_back(std::async(std::launch::async, work, std::cref(q)));
  std::vector<PerQuestion> done;
  std::exception_ptr failure;
  for (auto& f : pending) {
    try {
      done.push_back(f.get());
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& pq : done) trace.insert(trace.end(), pq.retrieve.begin(), pq.retrieve.end());
  for (auto& pq : done) trace.insert(trace.end(), pq.answer.begin(), pq.answer.end());

  RefinedResponse response;
  if (cove) {
    std::vector<VerifiedAnswer> answers;
    for (const auto& pq : done) answers.push_back(pq.outcome.answer);
    response = refine_cove(record, questions, answers, config, &trace);
  } else {
    std::vector<QuestionOutcome> outcomes;
    for (auto& pq : done) outcomes.push_back(std::move(pq.outcome));
    response = refine_rarr(record, outcomes, config, &trace);
  }
  response.trace = std::move(trace);
  return response;
}

RecordResult CorrectionPipeline::run_record(const SummaryRecord& record, const PipelineConfig& config) noexcept {
  RecordResult result;
  result.record_id = record.id;
  try {
    result.response = run_pipeline(record, config);
    result.succeeded = true;
  } catch (const std::exception& e) {
    result.succeeded = false;
    result.error = e.what();
    spdlog::warn("record {} failed: {}", record.id, e.what());
  }
  return result;
}

}  // namespace hallucorrect
