#include "hallucorrect/serialize.h"

#include "hallucorrect/errors.h"

namespace hallucorrect {

using nlohmann::json;

namespace {

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename E>
json opt_enum(const std::optional<E>& v) {
  return v ? json(to_string(*v)) : json(nullptr);
}

template <typename T>
std::optional<T> read_opt(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

template <typename E, typename Parse>
std::optional<E> read_opt_enum(const json& j, const char* key, Parse parse) {
  auto s = read_opt<std::string>(j, key);
  if (!s) return std::nullopt;
  return parse(*s);
}

template <typename T>
T read_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

}  // namespace

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

void to_json(json& j, const SummaryRecord& v) {
  j = json{{"id", v.id},
           {"gold_summary", v.gold_summary},
           {"input_summary", v.input_summary},
           {"source_article", opt(v.source_article)},
           {"domain_tag", v.domain_tag}};
  if (v.is_factual) j["is_factual"] = *v.is_factual;
}

void from_json(const json& j, SummaryRecord& v) {
  v.id = j.at("id").get<std::string>();
  v.gold_summary = j.at("gold_summary").get<std::string>();
  v.input_summary = j.at("input_summary").get<std::string>();
  v.source_article = read_opt<std::string>(j, "source_article");
  v.domain_tag = read_or<std::string>(j, "domain_tag", "news");
  v.is_factual = read_opt<bool>(j, "is_factual");
}

void to_json(json& j, const VerificationQuestion& v) {
  j = json{{"index", v.index}, {"text", v.text}};
}

void from_json(const json& j, VerificationQuestion& v) {
  v.index = j.at("index").get<int>();
  v.text = j.at("text").get<std::string>();
}

void to_json(json& j, const EvidenceItem& v) {
  j = json{{"rank", v.rank},
           {"text", v.text},
           {"url", opt(v.url)},
           {"title", opt(v.title)},
           {"score", opt(v.score)}};
}

void from_json(const json& j, EvidenceItem& v) {
  v.rank = j.at("rank").get<int>();
  v.text = j.at("text").get<std::string>();
  v.url = read_opt<std::string>(j, "url");
  v.title = read_opt<std::string>(j, "title");
  v.score = read_opt<double>(j, "score");
}

void to_json(json& j, const EvidenceBundle& v) {
  j = json{{"source_kind", to_string(v.source_kind)},
           {"engine", opt_enum(v.engine)},
           {"mode", opt_enum(v.mode)},
           {"items", v.items},
           {"concatenated", v.concatenated},
           {"degraded", v.degraded},
           {"notes", v.notes}};
}

void from_json(const json& j, EvidenceBundle& v) {
  v.source_kind = parse_source_kind(j.at("source_kind").get<std::string>());
  v.engine = read_opt_enum<Engine>(j, "engine", parse_engine);
  v.mode = read_opt_enum<RetrievalMode>(j, "mode", parse_mode);
  v.items = read_or<std::vector<EvidenceItem>>(j, "items", {});
  v.concatenated = read_or<std::string>(j, "concatenated", "");
  v.degraded = read_or<bool>(j, "degraded", false);
  v.notes = read_or<std::vector<std::string>>(j, "notes", {});
}

void to_json(json& j, const VerifiedAnswer& v) {
  j = json{{"question_index", v.question_index},
           {"answer_text", v.answer_text},
           {"agreement", opt_enum(v.agreement)},
           {"reasoning", opt(v.reasoning)}};
}

void from_json(const json& j, VerifiedAnswer& v) {
  v.question_index = j.at("question_index").get<int>();
  v.answer_text = j.at("answer_text").get<std::string>();
  v.agreement = read_opt_enum<Agreement>(j, "agreement", parse_agreement);
  v.reasoning = read_opt<std::string>(j, "reasoning");
}

void to_json(json& j, const StageTrace& v) {
  j = json{{"stage", to_string(v.stage)},
           {"prompt", v.prompt},
           {"raw_output", v.raw_output},
           {"parsed", v.parsed},
           {"timestamp", v.timestamp},
           {"notes", v.notes}};
}

void from_json(const json& j, StageTrace& v) {
  v.stage = parse_stage(j.at("stage").get<std::string>());
  v.prompt = read_or<std::string>(j, "prompt", "");
  v.raw_output = read_or<std::string>(j, "raw_output", "");
  v.parsed = j.contains("parsed") ? j.at("parsed") : json(nullptr);
  v.timestamp = read_or<std::string>(j, "timestamp", "");
  v.notes = read_or<std::vector<std::string>>(j, "notes", {});
}

void to_json(json& j, const RefinedResponse& v) {
  j = json{{"text", v.text}, {"system", to_string(v.system)}, {"trace", v.trace}};
}

void from_json(const json& j, RefinedResponse& v) {
  v.text = j.at("text").get<std::string>();
  v.system = parse_system(j.at("system").get<std::string>());
  v.trace = read_or<std::vector<StageTrace>>(j, "trace", {});
}

void to_json(json& j, const PipelineConfig& v) {
  j = json{{"system", to_string(v.system)},
           {"llm_backend", v.llm_backend},
           {"evidence_source", to_string(v.evidence_source)},
           {"engine", opt_enum(v.engine)},
           {"mode", opt_enum(v.mode)},
           {"max_questions", v.max_questions},
           {"top_n", v.top_n},
           {"chunk_size", v.chunk_size},
           {"chunk_overlap", v.chunk_overlap},
           {"temperature", v.temperature},
           {"max_output_length", v.max_output_length},
           {"selection", to_string(v.selection)}};
}

// Missing keys keep their defaults so config files can be partial.
void from_json(const json& j, PipelineConfig& v) {
  PipelineConfig d;
  v.system = j.contains("system") ? parse_system(j.at("system").get<std::string>()) : d.system;
  v.llm_backend = read_or<std::string>(j, "llm_backend", d.llm_backend);
  v.evidence_source = j.contains("evidence_source")
                          ? parse_source_kind(j.at("evidence_source").get<std::string>())
                          : d.evidence_source;
  v.engine = read_opt_enum<Engine>(j, "engine", parse_engine);
  v.mode = read_opt_enum<RetrievalMode>(j, "mode", parse_mode);
  v.max_questions = read_or<int>(j, "max_questions", d.max_questions);
  v.top_n = read_or<int>(j, "top_n", d.top_n);
  v.chunk_size = read_or<int>(j, "chunk_size", d.chunk_size);
  v.chunk_overlap = read_or<int>(j, "chunk_overlap", d.chunk_overlap);
  v.temperature = read_or<double>(j, "temperature", d.temperature);
  v.max_output_length = read_or<int>(j, "max_output_length", d.max_output_length);
  v.selection = j.contains("selection") ? parse_selection(j.at("selection").get<std::string>())
                                        : d.selection;
}

void to_json(json& j, const RecordResult& v) {
  j = json{{"record_id", v.record_id},
           {"status", v.succeeded ? "succeeded" : "failed"},
           {"response", opt(v.response)},
           {"error", v.error}};
}

void from_json(const json& j, RecordResult& v) {
  v.record_id = j.at("record_id").get<std::string>();
  v.succeeded = j.at("status").get<std::string>() == "succeeded";
  v.response = read_opt<RefinedResponse>(j, "response");
  v.error = read_or<std::string>(j, "error", "");
}

void to_json(json& j, const NliTriple& v) {
  j = json{{"ent", v.entailment}, {"neu", v.neutral}, {"con", v.contradiction}};
}

void from_json(const json& j, NliTriple& v) {
  v.entailment = j.at("ent").get<double>();
  v.neutral = j.at("neu").get<double>();
  v.contradiction = j.at("con").get<double>();
}

void to_json(json& j, const GevalTriple& v) {
  j = json{{"overall", v.overall}, {"factuality", v.factuality}, {"relevance", v.relevance}};
}

void from_json(const json& j, GevalTriple& v) {
  v.overall = j.at("overall").get<double>();
  v.factuality = j.at("factuality").get<double>();
  v.relevance = j.at("relevance").get<double>();
}

void to_json(json& j, const MetricReport& v) {
  j = json{{"record_id", v.record_id},
           {"ned", v.ned},
           {"sem", v.sem},
           {"nli", v.nli},
           {"geval", v.geval}};
}

void from_json(const json& j, MetricReport& v) {
  v.record_id = j.at("record_id").get<std::string>();
  v.ned = j.at("ned").get<double>();
  v.sem = j.at("sem").get<double>();
  v.nli = j.at("nli").get<NliTriple>();
  v.geval = j.at("geval").get<GevalTriple>();
}

void to_json(json& j, const AggregateRow& v) {
  j = json{{"label", v.label},
           {"system", to_string(v.system)},
           {"evidence_source", to_string(v.evidence_source)},
           {"engine", opt_enum(v.engine)},
           {"mode", opt_enum(v.mode)},
           {"n", v.n},
           {"ned", v.ned},
           {"sem", v.sem},
           {"nli", v.nli},
           {"geval", v.geval}};
}

void from_json(const json& j, AggregateRow& v) {
  v.label = read_or<std::string>(j, "label", "");
  v.system = parse_system(j.at("system").get<std::string>());
  v.evidence_source = parse_source_kind(j.at("evidence_source").get<std::string>());
  v.engine = read_opt_enum<Engine>(j, "engine", parse_engine);
  v.mode = read_opt_enum<RetrievalMode>(j, "mode", parse_mode);
  v.n = j.at("n").get<std::size_t>();
  v.ned = j.at("ned").get<double>();
  v.sem = j.at("sem").get<double>();
  v.nli = j.at("nli").get<NliTriple>();
  v.geval = j.at("geval").get<GevalTriple>();
}

void to_json(json& j, const RunManifest& v) {
  j = json{{"run_id", v.run_id},
           {"config", v.config},
           {"dataset_digest", v.dataset_digest},
           {"record_count", v.record_count},
           {"succeeded", v.succeeded},
           {"failed", v.failed},
           {"timing", {{"wall_seconds", v.wall_seconds},
                       {"record_seconds_total", v.record_seconds_total}}}};
}

void from_json(const json& j, RunManifest& v) {
  v.run_id = j.at("run_id").get<std::string>();
  v.config = j.at("config").get<PipelineConfig>();
  v.dataset_digest = j.at("dataset_digest").get<std::string>();
  v.record_count = j.at("record_count").get<std::size_t>();
  v.succeeded = j.at("succeeded").get<std::vector<std::string>>();
  v.failed = j.at("failed").get<std::vector<std::string>>();
  if (j.contains("timing")) {
    const auto& t = j.at("timing");
    v.wall_seconds = read_or<double>(t, "wall_seconds", 0.0);
    v.record_seconds_total = read_or<double>(t, "record_seconds_total", 0.0);
  }
}

}  // namespace hallucorrect
