#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "hallucorrect/http.h"
#include "hallucorrect/types.h"

namespace hallucorrect {

class NliProvider {
 public:
  virtual ~NliProvider() = default;
  virtual std::string id() const = 0;
  // Longest premise the provider accepts, in whitespace words.
  virtual std::size_t max_premise_words() const { return 400; }
  // Class scores for (premise, hypothesis); need not be normalised.
  virtual NliTriple classify(const std::string& premise, const std::string& hypothesis) = 0;
};

/// Deterministic offline NLI heuristic. How much of the hypothesis the
/// premise covers drives entailment; negation and number mismatches
/// drive contradiction. Logits are softmaxed. It is directional: a long
/// premise covers a short hypothesis but not the reverse.
class LexicalNliProvider : public NliProvider {
 public:
  std::string id() const override { return "lexical"; }
  NliTriple classify(const std::string& premise, const std::string& hypothesis) override;
};

// Hugging Face inference style endpoint: POST {"inputs":{"text","text_pair"}}
// returning [{label, score}, ...]. Labels must name the three classes.
class HttpNliProvider : public NliProvider {
 public:
  HttpNliProvider(std::shared_ptr<HttpClient> http, std::string url, std::string api_key = "",
                  std::size_t max_premise_words = 400);
  std::string id() const override { return "http:" + url_; }
  std::size_t max_premise_words() const override { return max_words_; }
  NliTriple classify(const std::string& premise, const std::string& hypothesis) override;

 private:
  std::shared_ptr<HttpClient> http_;
  std::string url_;
  std::string api_key_;
  std::size_t max_words_;
  std::mutex mu_;
  std::map<std::pair<std::string, std::string>, NliTriple> memo_;
};

NliTriple parse_nli_labels(const nlohmann::json& body);

struct NliResult {
  NliTriple triple;
  bool premise_truncated = false;
};

// The generated text is the premise and the reference is the hypothesis.
// The premise is cut to the provider's limit (keeping its beginning); the
// result is renormalised to sum to one.
NliResult nli_scores(NliProvider& provider, const std::string& generated, const std::string& reference);

}  // namespace hallucorrect
