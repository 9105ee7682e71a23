#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hallucorrect/embedding.h"

namespace hallucorrect {

// Edit distance over Unicode code points (unit-cost insert/delete/substitute).
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

// levenshtein / max(|a|, |b|) over code points; 0 when both are empty.
double ned(std::string_view a, std::string_view b);

// Cosine of the embedder's vectors for `a` and `b`.
double semantic_similarity(Embedder& embedder, const std::string& a, const std::string& b);

// Sample Pearson correlation. Throws Error{kInvalidArgument} on a length
// mismatch or fewer than two points, Error{kDegenerateVariance} when either
// side is constant.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct AlignmentRow {
  std::string method;
  double human = 0.0;
  double geval = 0.0;
  double diff = 0.0;  // human - geval, rounded to 2 decimals

  bool operator==(const AlignmentRow&) const = default;
};

// One row per method, in key order. Throws Error{kInvalidArgument} if the
// two maps do not have the same keys.
std::vector<AlignmentRow> alignment_report(const std::map<std::string, double>& human_means,
                                           const std::map<std::string, double>& geval_means);

double round_to(double value, int decimals);

}  // namespace hallucorrect
