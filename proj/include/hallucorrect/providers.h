#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "hallucorrect/embedding.h"
#include "hallucorrect/http.h"
#include "hallucorrect/nli.h"
#include "hallucorrect/search.h"

namespace hallucorrect {

// Reads an environment variable; empty counts as unset.
std::optional<std::string> env(const char* name);

// "hashing" or "hashing:<dim>" (offline), or "http:<model>" against
// HC_EMBEDDING_BASE_URL with HC_EMBEDDING_API_KEY. Wrapped in a cache,
// on disk under `cache_dir` when given.
std::shared_ptr<Embedder> make_embedder(const std::string& spec, std::shared_ptr<HttpClient> http,
                                        std::optional<std::filesystem::path> cache_dir = std::nullopt);

// "lexical" (offline) or "http" against HC_NLI_URL with HC_NLI_API_KEY.
std::shared_ptr<NliProvider> make_nli(const std::string& spec, std::shared_ptr<HttpClient> http);

// Registers every engine whose credentials are present: google needs
// GOOGLE_API_KEY and GOOGLE_CSE_ID, bing needs BING_API_KEY, ddg needs
// nothing.
std::shared_ptr<SearchService> make_search_service(std::shared_ptr<HttpClient> http, SearchOptions options);

}  // namespace hallucorrect
