#include "hallucorrect/types.h"

#include <algorithm>
#include <array>
#include <utility>

#include "hallucorrect/errors.h"

namespace hallucorrect {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kMissingBinding: return "missing_binding";
    case ErrorCode::kBackendUnavailable: return "backend_unavailable";
    case ErrorCode::kAuthentication: return "authentication";
    case ErrorCode::kQuotaExceeded: return "quota_exceeded";
    case ErrorCode::kTransient: return "transient";
    case ErrorCode::kNetwork: return "network";
    case ErrorCode::kFixtureMissing: return "fixture_missing";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kZeroVector: return "zero_vector";
    case ErrorCode::kDegenerateVariance: return "degenerate_variance";
    case ErrorCode::kEmptyInput: return "empty_input";
  }
  return "unknown";
}

namespace {

template <typename E, std::size_t N>
E lookup(const std::array<std::pair<const char*, E>, N>& table, const std::string& s,
         const char* what) {
  for (const auto& [name, value] : table) {
    if (s == name) return value;
  }
  throw Error(ErrorCode::kInvalidArgument, std::string("unknown ") + what + ": '" + s + "'");
}

constexpr std::array<std::pair<const char*, SourceKind>, 4> kSourceKinds{{
    {"internal", SourceKind::kInternal},
    {"gold_article", SourceKind::kGoldArticle},
    {"gold", SourceKind::kGoldArticle},
    {"search", SourceKind::kSearch},
}};

constexpr std::array<std::pair<const char*, Engine>, 4> kEngines{{
    {"google", Engine::kGoogle},
    {"bing", Engine::kBing},
    {"ddg", Engine::kDdg},
    {"duckduckgo", Engine::kDdg},
}};

constexpr std::array<std::pair<const char*, RetrievalMode>, 4> kModes{{
    {"snippets", RetrievalMode::kSnippets},
    {"snip", RetrievalMode::kSnippets},
    {"full_article", RetrievalMode::kFullArticle},
    {"full", RetrievalMode::kFullArticle},
}};

constexpr std::array<std::pair<const char*, System>, 2> kSystems{{
    {"cove", System::kCove},
    {"rarr", System::kRarr},
}};

constexpr std::array<std::pair<const char*, Agreement>, 3> kAgreements{{
    {"agrees", Agreement::kAgrees},
    {"disagrees", Agreement::kDisagrees},
    {"irrelevant", Agreement::kIrrelevant},
}};

constexpr std::array<std::pair<const char*, Stage>, 4> kStages{{
    {"generate_questions", Stage::kGenerateQuestions},
    {"retrieve", Stage::kRetrieve},
    {"answer", Stage::kAnswer},
    {"refine", Stage::kRefine},
}};

constexpr std::array<std::pair<const char*, PassageSelection>, 2> kSelections{{
    {"pooled", PassageSelection::kPooled},
    {"per_article", PassageSelection::kPerArticle},
}};

}  // namespace

std::string to_string(SourceKind v) {
  switch (v) {
    case SourceKind::kInternal: return "internal";
    case SourceKind::kGoldArticle: return "gold_article";
    case SourceKind::kSearch: return "search";
  }
  return "internal";
}

std::string to_string(Engine v) {
  switch (v) {
    case Engine::kGoogle: return "google";
    case Engine::kBing: return "bing";
    case Engine::kDdg: return "ddg";
  }
  return "google";
}

std::string to_string(RetrievalMode v) {
  return v == RetrievalMode::kSnippets ? "snippets" : "full_article";
}

std::string to_string(System v) { return v == System::kCove ? "cove" : "rarr"; }

std::string to_string(Agreement v) {
  switch (v) {
    case Agreement::kAgrees: return "agrees";
    case Agreement::kDisagrees: return "disagrees";
    case Agreement::kIrrelevant: return "irrelevant";
  }
  return "irrelevant";
}

std::string to_string(Stage v) {
  switch (v) {
    case Stage::kGenerateQuestions: return "generate_questions";
    case Stage::kRetrieve: return "retrieve";
    case Stage::kAnswer: return "answer";
    case Stage::kRefine: return "refine";
  }
  return "generate_questions";
}

std::string to_string(PassageSelection v) {
  return v == PassageSelection::kPooled ? "pooled" : "per_article";
}

SourceKind parse_source_kind(const std::string& s) { return lookup(kSourceKinds, s, "evidence source"); }
Engine parse_engine(const std::string& s) { return lookup(kEngines, s, "engine"); }
RetrievalMode parse_mode(const std::string& s) { return lookup(kModes, s, "retrieval mode"); }
System parse_system(const std::string& s) { return lookup(kSystems, s, "system"); }
Agreement parse_agreement(const std::string& s) { return lookup(kAgreements, s, "agreement"); }
Stage parse_stage(const std::string& s) { return lookup(kStages, s, "stage"); }
PassageSelection parse_selection(const std::string& s) { return lookup(kSelections, s, "passage selection"); }

std::string concatenate_items(const std::vector<EvidenceItem>& items) {
  std::vector<const EvidenceItem*> ordered;
  ordered.reserve(items.size());
  for (const auto& item : items) ordered.push_back(&item);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const EvidenceItem* a, const EvidenceItem* b) { return a->rank < b->rank; });
  std::string out;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (i > 0) out += kEvidenceSeparator;
    out += ordered[i]->text;
  }
  return out;
}

}  // namespace hallucorrect
