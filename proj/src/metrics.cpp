#include "hallucorrect/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hallucorrect/errors.h"
#include "hallucorrect/text_util.h"

namespace hallucorrect {

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  // Single row over the shorter string.
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
      diag = up;
    }
  }
  return row[b.size()];
}

double ned(std::string_view a, std::string_view b) {
  auto ua = utf8_to_u32(a);
  auto ub = utf8_to_u32(b);
  auto longest = std::max(ua.size(), ub.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(levenshtein(ua, ub)) / static_cast<double>(longest);
}

double semantic_similarity(Embedder& embedder, const std::string& a, const std::string& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kInvalidArgument, "semantic similarity of empty text");
  auto v = embedder.embed({a, b});
  return cosine(v.at(0), v.at(1));
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::kInvalidArgument, "pearson: length mismatch");
  if (xs.size() < 2) throw Error(ErrorCode::kInvalidArgument, "pearson: need at least two points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::kDegenerateVariance, "pearson: zero variance");
  return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

double round_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // Relative nudge so decimal halves stored slightly low (0.285) still
  // round away from zero.
  return std::round(value * scale * (1.0 + 1e-12)) / scale;
}

std::vector<AlignmentRow> alignment_report(const std::map<std::string, double>& human_means,
                                           const std::map<std::string, double>& geval_means) {
  if (human_means.size() != geval_means.size()) {
    throw Error(ErrorCode::kInvalidArgument, "alignment: method sets differ");
  }
  std::vector<AlignmentRow> rows;
  for (const auto& [method, human] : human_means) {
    auto it = geval_means.find(method);
    if (it == geval_means.end()) throw Error(ErrorCode::kInvalidArgument, "alignment: no judge mean for " + method);
    rows.push_back({method, human, it->second, round_to(human - it->second, 2)});
  }
  return rows;
}

}  // namespace hallucorrect
