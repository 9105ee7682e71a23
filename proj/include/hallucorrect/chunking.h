#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hallucorrect {

struct Chunk {
  std::string text;
  std::string source_url;
  int position = 0;
  std::optional<std::vector<double>> embedding;
  std::optional<double> score;

  bool operator==(const Chunk&) const = default;
};

/// Splits `text` into windows of `chunk_size` whitespace tokens. Windows
/// start at every multiple of (chunk_size - overlap) below the token count,
/// so consecutive windows share `overlap` tokens and the tail may be
/// shorter. Chunk text re-joins tokens with single spaces.
/// Throws Error{kInvalidArgument} unless chunk_size > overlap >= 0.
std::vector<Chunk> chunk_text(std::string_view text, int chunk_size, int overlap,
                              const std::string& source_url = "");

}  // namespace hallucorrect
