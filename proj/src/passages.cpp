#include "hallucorrect/passages.h"

#include <algorithm>
#include <numeric>

#include "hallucorrect/embedding.h"
#include "hallucorrect/errors.h"

namespace hallucorrect {

std::vector<Chunk> select_top_passages(std::span<const double> query_embedding, std::vector<Chunk> chunks, int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "select_top_passages: k must be >= 1");
  std::vector<double> scores(chunks.size());
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    if (!chunks[i].embedding) {
      throw Error(ErrorCode::kInvalidArgument, "select_top_passages: chunk " + std::to_string(i) + " has no embedding");
    }
    scores[i] = cosine(query_embedding, *chunks[i].embedding);
  }
  std::vector<std::size_t> order(chunks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto take = std::min(order.size(), static_cast<std::size_t>(k));
  std::partial_sort(order.begin(), order.begin() + static_cast<long>(take), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      if (chunks[a].position != chunks[b].position) return chunks[a].position < chunks[b].position;
                      return a < b;
                    });
  std::vector<Chunk> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    auto& chunk = chunks[order[i]];
    chunk.score = scores[order[i]];
    out.push_back(std::move(chunk));
  }
  return out;
}

}  // namespace hallucorrect
