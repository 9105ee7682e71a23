#pragma once

#include <span>
#include <vector>

#include "hallucorrect/chunking.h"

namespace hallucorrect {

/// The k chunks most cosine-similar to `query_embedding`, best first, with
/// `score` filled in. Ties go to the smaller position, then to the earlier
/// input. Chunks without an embedding raise Error{kInvalidArgument}.
std::vector<Chunk> select_top_passages(std::span<const double> query_embedding, std::vector<Chunk> chunks,
                                       int k);

}  // namespace hallucorrect
