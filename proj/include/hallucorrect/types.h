#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hallucorrect {

enum class SourceKind { kInternal, kGoldArticle, kSearch };
enum class Engine { kGoogle, kBing, kDdg };
enum class RetrievalMode { kSnippets, kFullArticle };
enum class System { kCove, kRarr };
enum class Agreement { kAgrees, kDisagrees, kIrrelevant };
enum class Stage { kGenerateQuestions, kRetrieve, kAnswer, kRefine };
// How full-article passages are chosen across the fetched pages.
enum class PassageSelection { kPooled, kPerArticle };

std::string to_string(SourceKind v);
std::string to_string(Engine v);
std::string to_string(RetrievalMode v);
std::string to_string(System v);
std::string to_string(Agreement v);
std::string to_string(Stage v);
std::string to_string(PassageSelection v);

// Parsers accept the canonical names plus the short CLI aliases
// ("gold", "full", "duckduckgo"). They throw Error{kInvalidArgument}.
SourceKind parse_source_kind(const std::string& s);
Engine parse_engine(const std::string& s);
RetrievalMode parse_mode(const std::string& s);
System parse_system(const std::string& s);
Agreement parse_agreement(const std::string& s);
Stage parse_stage(const std::string& s);
PassageSelection parse_selection(const std::string& s);

/// One dataset item. `input_summary` is the hallucinated baseline response
/// the pipeline starts from; `gold_summary` is the reference answer.
struct SummaryRecord {
  std::string id;
  std::string gold_summary;
  std::string input_summary;
  std::optional<std::string> source_article;
  std::string domain_tag = "news";
  // Human factuality label from the source dataset, when it has one.
  std::optional<bool> is_factual;

  bool operator==(const SummaryRecord&) const = default;
};

struct VerificationQuestion {
  int index = 1;
  std::string text;

  bool operator==(const VerificationQuestion&) const = default;
};

struct EvidenceItem {
  int rank = 1;
  std::string text;
  std::optional<std::string> url;
  std::optional<std::string> title;
  std::optional<double> score;

  bool operator==(const EvidenceItem&) const = default;
};

inline constexpr const char* kEvidenceSeparator = "\n\n";

struct EvidenceBundle {
  SourceKind source_kind = SourceKind::kInternal;
  std::optional<Engine> engine;
  std::optional<RetrievalMode> mode;
  std::vector<EvidenceItem> items;
  std::string concatenated;
  // Set when retrieval fell short (every page fetch failed, no article).
  bool degraded = false;
  std::vector<std::string> notes;

  bool operator==(const EvidenceBundle&) const = default;
};

// Joins item texts in rank order with kEvidenceSeparator.
std::string concatenate_items(const std::vector<EvidenceItem>& items);

struct VerifiedAnswer {
  int question_index = 1;
  std::string answer_text;
  std::optional<Agreement> agreement;
  std::optional<std::string> reasoning;

  bool operator==(const VerifiedAnswer&) const = default;
};

struct StageTrace {
  Stage stage = Stage::kGenerateQuestions;
  std::string prompt;
  std::string raw_output;
  nlohmann::json parsed;
  std::string timestamp;
  std::vector<std::string> notes;

  bool operator==(const StageTrace&) const = default;
};

struct RefinedResponse {
  std::string text;
  System system = System::kCove;
  std::vector<StageTrace> trace;

  bool operator==(const RefinedResponse&) const = default;
};

struct PipelineConfig {
  System system = System::kRarr;
  std::string llm_backend = "openai:gpt-4o-mini-2024-07-18";
  SourceKind evidence_source = SourceKind::kInternal;
  std::optional<Engine> engine;
  std::optional<RetrievalMode> mode;
  int max_questions = 5;
  int top_n = 5;
  int chunk_size = 256;
  int chunk_overlap = 64;
  double temperature = 0.0;
  int max_output_length = 512;
  PassageSelection selection = PassageSelection::kPooled;

  bool operator==(const PipelineConfig&) const = default;
};

// Outcome of one record in a batch: either a response or an error message.
struct RecordResult {
  std::string record_id;
  bool succeeded = false;
  std::optional<RefinedResponse> response;
  std::string error;

  bool operator==(const RecordResult&) const = default;
};

struct NliTriple {
  double entailment = 0.0;
  double neutral = 0.0;
  double contradiction = 0.0;

  bool operator==(const NliTriple&) const = default;
};

struct GevalTriple {
  double overall = 0.0;
  double factuality = 0.0;
  double relevance = 0.0;

  bool operator==(const GevalTriple&) const = default;
};

struct MetricReport {
  std::string record_id;
  double ned = 0.0;
  double sem = 0.0;
  NliTriple nli;
  GevalTriple geval;

  bool operator==(const MetricReport&) const = default;
};

/// Dataset-level means of every MetricReport field, one row of the
/// results table.
struct AggregateRow {
  std::string label;
  System system = System::kCove;
  SourceKind evidence_source = SourceKind::kInternal;
  std::optional<Engine> engine;
  std::optional<RetrievalMode> mode;
  std::size_t n = 0;
  double ned = 0.0;
  double sem = 0.0;
  NliTriple nli;
  GevalTriple geval;

  bool operator==(const AggregateRow&) const = default;
};

struct RunManifest {
  std::string run_id;
  PipelineConfig config;
  std::string dataset_digest;
  std::size_t record_count = 0;
  std::vector<std::string> succeeded;
  std::vector<std::string> failed;
  // Wall-clock totals; excluded when comparing reruns.
  double wall_seconds = 0.0;
  double record_seconds_total = 0.0;

  bool operator==(const RunManifest&) const = default;
};

}  // namespace hallucorrect
