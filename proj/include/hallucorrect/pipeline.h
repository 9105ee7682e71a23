#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hallucorrect/evidence.h"
#include "hallucorrect/llm.h"
#include "hallucorrect/types.h"

namespace hallucorrect {

// Produces the timestamp stored on each trace entry.
using TraceClock = std::function<std::string()>;
std::string utc_timestamp();

// Instruction used as CoVe's "original question"; the article is appended
// when the pipeline runs with gold-article evidence.
inline constexpr std::string_view kSummarizeInstruction = "Summarize the news article accurately.";

// Everything produced for one verification question before refinement.
struct QuestionOutcome {
  VerificationQuestion question;
  EvidenceBundle evidence;
  VerifiedAnswer answer;
};

/// The four-stage correction workflow for both systems.
///
/// Stage methods append the completions they issue to `trace` when it is
/// non-null. run_pipeline throws on failure; run_record turns a failure
/// into a failed RecordResult.
class CorrectionPipeline {
 public:
  CorrectionPipeline(std::shared_ptr<LlmGateway> gateway, std::shared_ptr<EvidenceRetriever> retriever,
                     TraceClock clock = utc_timestamp);

  std::string original_question(const SummaryRecord& record, const PipelineConfig& config) const;

  std::vector<VerificationQuestion> generate_questions_cove(const SummaryRecord& record, const PipelineConfig& config,
                                                            std::vector<StageTrace>* trace = nullptr);
  std::vector<VerificationQuestion> generate_questions_rarr(const SummaryRecord& record, const PipelineConfig& config,
                                                            std::vector<StageTrace>* trace = nullptr);

  VerifiedAnswer answer_question_cove(const VerificationQuestion& question, const EvidenceBundle& evidence,
                                      const PipelineConfig& config, std::vector<StageTrace>* trace = nullptr);
  VerifiedAnswer answer_question_rarr(const std::string& claim, const VerificationQuestion& question,
                                      const EvidenceBundle& evidence, const PipelineConfig& config,
                                      std::vector<StageTrace>* trace = nullptr);

  RefinedResponse refine_cove(const SummaryRecord& record, const std::vector<VerificationQuestion>& questions,
                              const std::vector<VerifiedAnswer>& answers, const PipelineConfig& config,
                              std::vector<StageTrace>* trace = nullptr);
  RefinedResponse refine_rarr(const SummaryRecord& record, const std::vector<QuestionOutcome>& outcomes,
                              const PipelineConfig& config, std::vector<StageTrace>* trace = nullptr);

  RefinedResponse run_pipeline(const SummaryRecord& record, const PipelineConfig& config);
  RecordResult run_record(const SummaryRecord& record, const PipelineConfig& config) noexcept;

 private:
  std::string complete(const std::string& prompt, const PipelineConfig& config);
  StageTrace entry(Stage stage, std::string prompt, std::string raw, nlohmann::json parsed) const;
  std::vector<VerificationQuestion> finish_questions(std::vector<std::string> items, const PipelineConfig& config,
                                                     StageTrace& last);

  std::shared_ptr<LlmGateway> gateway_;
  std::shared_ptr<EvidenceRetriever> retriever_;
  TraceClock clock_;
};

// "Q1: ...\nA1: ..." pairs in index order, one pair after another.
std::string format_qa_pairs(const std::vector<VerificationQuestion>& questions,
                            const std::vector<VerifiedAnswer>& answers);

// Agreement verdict from the text following "Therefore:".
Agreement classify_agreement(std::string_view verdict);

// Question lines from a few-shot "I googled:" continuation. Items without
// the prefix are taken as they are.
std::vector<std::string> parse_googled_questions(std::string_view text);

}  // namespace hallucorrect
