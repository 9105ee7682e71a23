#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hallucorrect/http.h"
#include "hallucorrect/llm.h"

namespace hallucorrect {

/// Any OpenAI-compatible /chat/completions endpoint (OpenAI, Together AI,
/// vLLM, llama.cpp server, ...). The prompt is sent as one user message.
class OpenAiCompatibleBackend : public LlmBackend {
 public:
  OpenAiCompatibleBackend(std::shared_ptr<HttpClient> http, std::string base_url, std::string api_key,
                          std::string model);

  std::string complete(const CompletionRequest& request) override;

 private:
  std::shared_ptr<HttpClient> http_;
  std::string base_url_;
  std::string api_key_;
  std::string model_;
};

/// Offline backend driven by a rule file:
///
///   {"rules": [{"contains": ["Final Verification Questions"], "response": "1. ..."}],
///    "default": "..."}
///
/// The first rule whose substrings all occur in the prompt wins. Without a
/// match and without a default, the request fails as unavailable.
class ScriptedBackend : public LlmBackend {
 public:
  struct Rule {
    std::vector<std::string> contains;
    std::string response;
  };

  explicit ScriptedBackend(std::vector<Rule> rules, std::optional<std::string> fallback = std::nullopt);
  static std::shared_ptr<ScriptedBackend> from_file(const std::filesystem::path& path);

  std::string complete(const CompletionRequest& request) override;

 private:
  std::vector<Rule> rules_;
  std::optional<std::string> fallback_;
};

/// Builds a backend from an id of the form "<provider>:<model-or-path>":
///   openai:<model>    OPENAI_API_KEY, optional OPENAI_BASE_URL
///   together:<model>  TOGETHER_API_KEY
///   compat:<model>    HC_LLM_BASE_URL, optional HC_LLM_API_KEY
///   script:<path>     ScriptedBackend rule file
/// Throws Error{kConfig} for unknown providers or missing credentials.
std::shared_ptr<LlmBackend> make_backend(const std::string& id, std::shared_ptr<HttpClient> http);

}  // namespace hallucorrect
