#include "hallucorrect/validate.h"

#include <cmath>
#include <set>

namespace hallucorrect {

namespace {

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

std::vector<std::string> validate(const SummaryRecord& record) {
  std::vector<std::string> out;
  if (record.id.empty()) out.emplace_back("id empty");
  if (blank(record.gold_summary)) out.emplace_back("gold_summary empty");
  if (blank(record.input_summary)) out.emplace_back("input_summary empty");
  return out;
}

std::vector<std::string> validate(const std::vector<SummaryRecord>& dataset) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& record : dataset) {
    for (const auto& v : validate(record)) out.push_back("record '" + record.id + "': " + v);
    if (!record.id.empty() && !seen.insert(record.id).second) {
      out.push_back("duplicate id '" + record.id + "'");
    }
  }
  return out;
}

std::vector<std::string> validate(const std::vector<VerificationQuestion>& questions) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    const auto& q = questions[i];
    if (q.index != static_cast<int>(i) + 1) {
      out.push_back("question indices not contiguous at position " + std::to_string(i + 1));
    }
    if (blank(q.text)) out.push_back("question " + std::to_string(q.index) + " text empty");
  }
  return out;
}

std::vector<std::string> validate(const EvidenceBundle& bundle) {
  std::vector<std::string> out;
  if (bundle.source_kind == SourceKind::kSearch) {
    if (!bundle.engine) out.emplace_back("search bundle missing engine");
    if (!bundle.mode) out.emplace_back("search bundle missing mode");
  }
  if (bundle.source_kind == SourceKind::kInternal) {
    if (!bundle.items.empty()) out.emplace_back("internal bundle has items");
    if (!bundle.concatenated.empty()) out.emplace_back("internal bundle has concatenated text");
  }
  for (std::size_t i = 0; i < bundle.items.size(); ++i) {
    const auto& item = bundle.items[i];
    if (item.rank != static_cast<int>(i) + 1) {
      out.push_back("evidence ranks not contiguous at position " + std::to_string(i + 1));
    }
    if (item.text.empty()) out.push_back("evidence item " + std::to_string(item.rank) + " text empty");
  }
  if (bundle.concatenated != concatenate_items(bundle.items)) {
    out.emplace_back("concatenated text does not match items");
  }
  return out;
}

std::vector<std::string> validate(const VerifiedAnswer& answer,
                                  const std::vector<VerificationQuestion>& questions) {
  for (const auto& q : questions) {
    if (q.index == answer.question_index) return {};
  }
  return {"answer references unknown question " + std::to_string(answer.question_index)};
}

std::vector<std::string> validate(const RefinedResponse& response) {
  std::vector<std::string> out;
  if (blank(response.text)) out.emplace_back("refined text empty");
  for (std::size_t i = 1; i < response.trace.size(); ++i) {
    if (static_cast<int>(response.trace[i].stage) < static_cast<int>(response.trace[i - 1].stage)) {
      out.push_back("trace stage '" + to_string(response.trace[i].stage) + "' out of workflow order");
    }
  }
  return out;
}

std::vector<std::string> validate(const PipelineConfig& config) {
  std::vector<std::string> out;
  if (config.max_questions < 1) out.emplace_back("max_questions must be >= 1");
  if (config.top_n < 1) out.emplace_back("top_n must be >= 1");
  if (config.chunk_overlap < 0) out.emplace_back("chunk_overlap must be >= 0");
  if (config.chunk_overlap >= config.chunk_size) out.emplace_back("chunk_overlap must be < chunk_size");
  if (config.temperature < 0) out.emplace_back("temperature must be >= 0");
  if (config.max_output_length < 1) out.emplace_back("max_output_length must be >= 1");
  if (config.llm_backend.empty()) out.emplace_back("llm_backend empty");
  if (config.evidence_source == SourceKind::kSearch) {
    if (!config.engine) out.emplace_back("search source requires engine");
    if (!config.mode) out.emplace_back("search source requires mode");
  }
  return out;
}

std::vector<std::string> validate(const MetricReport& report) {
  std::vector<std::string> out;
  auto in = [](double x, double lo, double hi) { return x >= lo && x <= hi; };
  if (!in(report.ned, 0, 1)) out.emplace_back("ned outside [0,1]");
  if (!in(report.sem, -1, 1)) out.emplace_back("sem outside [-1,1]");
  const auto& n = report.nli;
  if (!in(n.entailment, 0, 1) || !in(n.neutral, 0, 1) || !in(n.contradiction, 0, 1)) {
    out.emplace_back("nli component outside [0,1]");
  }
  if (std::abs(n.entailment + n.neutral + n.contradiction - 1.0) > 1e-6) {
    out.emplace_back("nli triple does not sum to 1");
  }
  const auto& g = report.geval;
  if (!in(g.overall, 0, 1) || !in(g.factuality, 0, 1) || !in(g.relevance, 0, 1)) {
    out.emplace_back("geval component outside [0,1]");
  }
  return out;
}

}  // namespace hallucorrect
