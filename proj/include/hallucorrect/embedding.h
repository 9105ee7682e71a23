#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hallucorrect/http.h"

namespace hallucorrect {

using Embedding = std::vector<double>;

// Plain cosine. Throws Error{kInvalidArgument} on a dimension mismatch and
// Error{kZeroVector} when either side has zero norm.
double cosine(std::span<const double> u, std::span<const double> v);

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::string id() const = 0;
  // One vector per input, all of the same dimension.
  virtual std::vector<Embedding> embed(const std::vector<std::string>& texts) = 0;
};

/// Deterministic offline embedder: signed feature hashing of lowercased
/// word unigrams, bigrams and character trigrams, L2-normalised.
class HashingEmbedder : public Embedder {
 public:
  explicit HashingEmbedder(std::size_t dimension = 512) : dimension_(dimension) {}
  std::string id() const override { return "hashing-" + std::to_string(dimension_); }
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;

 private:
  std::size_t dimension_;
};

// OpenAI-compatible /embeddings endpoint (any server hosting e.g. SimCSE).
class HttpEmbedder : public Embedder {
 public:
  HttpEmbedder(std::shared_ptr<HttpClient> http, std::string base_url, std::string model, std::string api_key = "");
  std::string id() const override { return "http:" + model_; }
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;

 private:
  std::shared_ptr<HttpClient> http_;
  std::string base_url_;
  std::string model_;
  std::string api_key_;
};

/// Memoises another embedder by text digest, optionally on disk under
/// <dir>/<provider>/<digest>.json.
class CachingEmbedder : public Embedder {
 public:
  CachingEmbedder(std::shared_ptr<Embedder> inner, std::optional<std::filesystem::path> dir = std::nullopt);
  std::string id() const override { return inner_->id(); }
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;

  std::size_t misses() const { return misses_; }

 private:
  std::shared_ptr<Embedder> inner_;
  std::optional<std::filesystem::path> dir_;
  std::mutex mu_;
  std::map<std::string, Embedding> memory_;
  std::size_t misses_ = 0;
};

}  // namespace hallucorrect
