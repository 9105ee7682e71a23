#include "hallucorrect/providers.h"

#include <cstdlib>

#include "hallucorrect/errors.h"
#include "hallucorrect/text_util.h"

namespace hallucorrect {

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

std::shared_ptr<Embedder> make_embedder(const std::string& spec, std::shared_ptr<HttpClient> http,
                                        std::optional<std::filesystem::path> cache_dir) {
  std::shared_ptr<Embedder> inner;
  if (spec == "hashing") {
    inner = std::make_shared<HashingEmbedder>();
  } else if (spec.starts_with("hashing:")) {
    int dim = 0;
    try {
      dim = std::stoi(spec.substr(8));
    } catch (const std::exception&) {
    }
    if (dim < 1) throw Error(ErrorCode::kConfig, "bad embedder dimension in '" + spec + "'");
    inner = std::make_shared<HashingEmbedder>(static_cast<std::size_t>(dim));
  } else if (spec.starts_with("http:")) {
    auto base = env("HC_EMBEDDING_BASE_URL");
    if (!base) throw Error(ErrorCode::kConfig, "HC_EMBEDDING_BASE_URL is not set");
    inner = std::make_shared<HttpEmbedder>(std::move(http), *base, spec.substr(5),
                                           env("HC_EMBEDDING_API_KEY").value_or(""));
  } else {
    throw Error(ErrorCode::kConfig, "unknown embedder '" + spec + "'");
  }
  return std::make_shared<CachingEmbedder>(inner, std::move(cache_dir));
}

std::shared_ptr<NliProvider> make_nli(const std::string& spec, std::shared_ptr<HttpClient> http) {
  if (spec == "lexical") return std::make_shared<LexicalNliProvider>();
  if (spec == "http") {
    auto url = env("HC_NLI_URL");
    if (!url) throw Error(ErrorCode::kConfig, "HC_NLI_URL is not set");
    std::size_t max_words = 400;
    if (auto w = env("HC_NLI_MAX_WORDS")) max_words = static_cast<std::size_t>(std::stoul(*w));
    return std::make_shared<HttpNliProvider>(std::move(http), *url, env("HC_NLI_API_KEY").value_or(""), max_words);
  }
  throw Error(ErrorCode::kConfig, "unknown NLI provider '" + spec + "'");
}

std::shared_ptr<SearchService> make_search_service(std::shared_ptr<HttpClient> http, SearchOptions options) {
  auto service = std::make_shared<SearchService>(std::move(options));
  auto google_key = env("GOOGLE_API_KEY");
  auto google_cx = env("GOOGLE_CSE_ID");
  if (google_key && google_cx) {
    service->register_engine(Engine::kGoogle, std::make_shared<GoogleSearchClient>(http, *google_key, *google_cx));
  }
  if (auto bing = env("BING_API_KEY")) {
    auto endpoint = env("BING_ENDPOINT").value_or("https://api.bing.microsoft.com/v7.0/search");
    service->register_engine(Engine::kBing, std::make_shared<BingSearchClient>(http, *bing, endpoint));
  }
  service->register_engine(Engine::kDdg, std::make_shared<DdgSearchClient>(http));
  return service;
}

}  // namespace hallucorrect
