#include "hallucorrect/llm_backends.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hallucorrect/errors.h"
#include "hallucorrect/serialize.h"

namespace hallucorrect {

using nlohmann::json;

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

std::string require_env(const char* name, const std::string& backend_id) {
  const char* v = std::getenv(name);
  if (!v || !*v) {
    throw Error(ErrorCode::kConfig, std::string("backend '") + backend_id + "' needs " + name);
  }
  return v;
}

std::string strip_trailing_slash(std::string s) {
  while (!s.empty() && s.back() == '/') s.pop_back();
  return s;
}

}  // namespace

OpenAiCompatibleBackend::OpenAiCompatibleBackend(std::shared_ptr<HttpClient> http, std::string base_url,
                                                 std::string api_key, std::string model)
    : http_(std::move(http)),
      base_url_(strip_trailing_slash(std::move(base_url))),
      api_key_(std::move(api_key)),
      model_(std::move(model)) {}

std::string OpenAiCompatibleBackend::complete(const CompletionRequest& request) {
  json body{{"model", model_},
            {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
            {"temperature", request.temperature},
            {"max_tokens", request.max_output_length}};
  HttpRequest http_request;
  http_request.method = "POST";
  http_request.url = base_url_ + "/chat/completions";
  http_request.body = to_text(body);
  http_request.content_type = "application/json";
  if (!api_key_.empty()) http_request.headers.emplace_back("Authorization", "Bearer " + api_key_);

  auto response = http_->send(http_request);
  if (response.status == 401 || response.status == 403) {
    throw Error(ErrorCode::kAuthentication, model_ + ": HTTP " + std::to_string(response.status));
  }
  if (response.status == 429 || response.status >= 500) {
    throw Error(ErrorCode::kTransient, model_ + ": HTTP " + std::to_string(response.status));
  }
  if (response.status != 200) {
    throw Error(ErrorCode::kBackendUnavailable,
                model_ + ": HTTP " + std::to_string(response.status) + ": " + response.body.substr(0, 300));
  }
  try {
    auto j = json::parse(response.body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string() : content.get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBackendUnavailable, model_ + ": unexpected response: " + e.what());
  }
}

ScriptedBackend::ScriptedBackend(std::vector<Rule> rules, std::optional<std::string> fallback)
    : rules_(std::move(rules)), fallback_(std::move(fallback)) {}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open script '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    auto j = json::parse(buf.str());
    std::vector<Rule> rules;
    for (const auto& r : j.value("rules", json::array())) {
      Rule rule;
      const auto& c = r.at("contains");
      if (c.is_string()) {
        rule.contains.push_back(c.get<std::string>());
      } else {
        rule.contains = c.get<std::vector<std::string>>();
      }
      rule.response = r.at("response").get<std::string>();
      rules.push_back(std::move(rule));
    }
    std::optional<std::string> fallback;
    if (j.contains("default") && j["default"].is_string()) fallback = j["default"].get<std::string>();
    return std::make_shared<ScriptedBackend>(std::move(rules), std::move(fallback));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, "bad script '" + path.string() + "': " + e.what());
  }
}

std::string ScriptedBackend::complete(const CompletionRequest& request) {
  for (const auto& rule : rules_) {
    bool all = true;
    for (const auto& needle : rule.contains) {
      if (request.prompt.find(needle) == std::string::npos) {
        all = false;
        break;
      }
    }
    if (all) return rule.response;
  }
  if (fallback_) return *fallback_;
  throw Error(ErrorCode::kBackendUnavailable, "scripted backend has no rule for prompt");
}

std::shared_ptr<LlmBackend> make_backend(const std::string& id, std::shared_ptr<HttpClient> http) {
  auto colon = id.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::kConfig, "backend id must look like provider:model, got '" + id + "'");
  }
  auto provider = id.substr(0, colon);
  auto rest = id.substr(colon + 1);
  if (provider == "script") return ScriptedBackend::from_file(rest);
  if (provider == "openai") {
    return std::make_shared<OpenAiCompatibleBackend>(
        http, env_or("OPENAI_BASE_URL", "https://api.openai.com/v1"), require_env("OPENAI_API_KEY", id), rest);
  }
  if (provider == "together") {
    return std::make_shared<OpenAiCompatibleBackend>(http, "https://api.together.xyz/v1",
                                                     require_env("TOGETHER_API_KEY", id), rest);
  }
  if (provider == "compat") {
    return std::make_shared<OpenAiCompatibleBackend>(http, require_env("HC_LLM_BASE_URL", id),
                                                     env_or("HC_LLM_API_KEY", ""), rest);
  }
  throw Error(ErrorCode::kConfig, "unknown backend provider '" + provider + "'");
}

}  // namespace hallucorrect
