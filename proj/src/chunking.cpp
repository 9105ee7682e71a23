#include "hallucorrect/chunking.h"

#include <algorithm>

#include "hallucorrect/errors.h"
#include "hallucorrect/text_util.h"

namespace hallucorrect {

std::vector<Chunk> chunk_text(std::string_view text, int chunk_size, int overlap, const std::string& source_url) {
  if (overlap < 0 || chunk_size <= overlap) {
    throw Error(ErrorCode::kInvalidArgument, "chunk_text needs chunk_size > overlap >= 0");
  }
  auto words = split_words(text);
  std::vector<Chunk> out;
  const std::size_t size = static_cast<std::size_t>(chunk_size);
  const std::size_t stride = static_cast<std::size_t>(chunk_size - overlap);
  for (std::size_t start = 0; start < words.size(); start += stride) {
    auto end = std::min(words.size(), start + size);
    std::vector<std::string> window(words.begin() + static_cast<long>(start), words.begin() + static_cast<long>(end));
    Chunk chunk;
    chunk.text = join(window, " ");
    chunk.source_url = source_url;
    chunk.position = static_cast<int>(out.size());
    out.push_back(std::move(chunk));
  }
  return out;
}

}  // namespace hallucorrect
