#pragma once

#include <string>
#include <vector>

#include "hallucorrect/types.h"

// Invariant checks. Each returns human-readable violations; an empty list
// means the value is valid. Nothing here throws.
namespace hallucorrect {

std::vector<std::string> validate(const SummaryRecord& record);
std::vector<std::string> validate(const std::vector<SummaryRecord>& dataset);
std::vector<std::string> validate(const std::vector<VerificationQuestion>& questions);
std::vector<std::string> validate(const EvidenceBundle& bundle);
std::vector<std::string> validate(const VerifiedAnswer& answer,
                                  const std::vector<VerificationQuestion>& questions);
std::vector<std::string> validate(const RefinedResponse& response);
std::vector<std::string> validate(const PipelineConfig& config);
std::vector<std::string> validate(const MetricReport& report);

}  // namespace hallucorrect
