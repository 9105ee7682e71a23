#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "hallucorrect/errors.h"
#include "hallucorrect/types.h"

// Line-delimited JSON schema for every domain type. Field names are the
// snake_case names of the struct members; absent optionals are written
// as null and read back from null or a missing key.
namespace hallucorrect {

void to_json(nlohmann::json& j, const SummaryRecord& v);
void from_json(const nlohmann::json& j, SummaryRecord& v);
void to_json(nlohmann::json& j, const VerificationQuestion& v);
void from_json(const nlohmann::json& j, VerificationQuestion& v);
void to_json(nlohmann::json& j, const EvidenceItem& v);
void from_json(const nlohmann::json& j, EvidenceItem& v);
void to_json(nlohmann::json& j, const EvidenceBundle& v);
void from_json(const nlohmann::json& j, EvidenceBundle& v);
void to_json(nlohmann::json& j, const VerifiedAnswer& v);
void from_json(const nlohmann::json& j, VerifiedAnswer& v);
void to_json(nlohmann::json& j, const StageTrace& v);
void from_json(const nlohmann::json& j, StageTrace& v);
void to_json(nlohmann::json& j, const RefinedResponse& v);
void from_json(const nlohmann::json& j, RefinedResponse& v);
void to_json(nlohmann::json& j, const PipelineConfig& v);
void from_json(const nlohmann::json& j, PipelineConfig& v);
void to_json(nlohmann::json& j, const RecordResult& v);
void from_json(const nlohmann::json& j, RecordResult& v);
void to_json(nlohmann::json& j, const NliTriple& v);
void from_json(const nlohmann::json& j, NliTriple& v);
void to_json(nlohmann::json& j, const GevalTriple& v);
void from_json(const nlohmann::json& j, GevalTriple& v);
void to_json(nlohmann::json& j, const MetricReport& v);
void from_json(const nlohmann::json& j, MetricReport& v);
void to_json(nlohmann::json& j, const AggregateRow& v);
void from_json(const nlohmann::json& j, AggregateRow& v);
void to_json(nlohmann::json& j, const RunManifest& v);
void from_json(const nlohmann::json& j, RunManifest& v);

// JSON text; invalid UTF-8 in strings becomes U+FFFD instead of throwing.
inline std::string to_text(const nlohmann::json& j, int indent = -1) {
  return j.dump(indent, ' ', false, nlohmann::json::error_handler_t::replace);
}

// One line, no trailing newline.
template <typename T>
std::string serialize(const T& value) {
  return to_text(nlohmann::json(value));
}

// Throws Error{kParse} on malformed JSON.
nlohmann::json parse_json(std::string_view text);

// Throws Error{kParse} on malformed text or a schema mismatch.
template <typename T>
T deserialize(std::string_view text) {
  auto j = parse_json(text);
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

}  // namespace hallucorrect
