#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hallucorrect/concurrency.h"
#include "hallucorrect/http.h"
#include "hallucorrect/retry.h"
#include "hallucorrect/types.h"

namespace hallucorrect {

struct SearchResult {
  int rank = 1;
  std::string url;
  std::string title;
  std::string snippet;

  bool operator==(const SearchResult&) const = default;
};

void to_json(nlohmann::json& j, const SearchResult& v);
void from_json(const nlohmann::json& j, SearchResult& v);

// One web search API. Throws Error: kQuotaExceeded for quota/rate refusals,
// kAuthentication for bad keys, kTransient for retryable server trouble.
class SearchEngineClient {
 public:
  virtual ~SearchEngineClient() = default;
  virtual std::vector<SearchResult> query(const std::string& query, int n) = 0;
};

// Google Programmable Search (Custom Search JSON API).
class GoogleSearchClient : public SearchEngineClient {
 public:
  GoogleSearchClient(std::shared_ptr<HttpClient> http, std::string api_key, std::string engine_id);
  std::vector<SearchResult> query(const std::string& query, int n) override;

 private:
  std::shared_ptr<HttpClient> http_;
  std::string api_key_;
  std::string engine_id_;
};

// Bing Web Search v7.
class BingSearchClient : public SearchEngineClient {
 public:
  BingSearchClient(std::shared_ptr<HttpClient> http, std::string api_key,
                   std::string endpoint = "https://api.bing.microsoft.com/v7.0/search");
  std::vector<SearchResult> query(const std::string& query, int n) override;

 private:
  std::shared_ptr<HttpClient> http_;
  std::string api_key_;
  std::string endpoint_;
};

// DuckDuckGo HTML endpoint; no key required.
class DdgSearchClient : public SearchEngineClient {
 public:
  explicit DdgSearchClient(std::shared_ptr<HttpClient> http,
                           std::string endpoint = "https://html.duckduckgo.com/html/");
  std::vector<SearchResult> query(const std::string& query, int n) override;

 private:
  std::shared_ptr<HttpClient> http_;
  std::string endpoint_;
};

std::vector<SearchResult> parse_google_response(std::string_view body, int n);
std::vector<SearchResult> parse_bing_response(std::string_view body, int n);
std::vector<SearchResult> parse_ddg_html(std::string_view html, int n);

enum class FixtureMode {
  kLive,    // always call the engine, never touch fixtures
  kRecord,  // read fixtures when present, otherwise call and write them
  kReplay,  // fixtures only; a miss is Error{kFixtureMissing}
};

FixtureMode parse_fixture_mode(const std::string& s);

// Fixture layout: <dir>/search/<engine>/<digest(engine, query, n)>.json
std::filesystem::path search_fixture_path(const std::filesystem::path& dir, Engine engine,
                                          const std::string& query, int n);

struct SearchOptions {
  std::optional<std::filesystem::path> fixture_dir;
  FixtureMode mode = FixtureMode::kRecord;
  double requests_per_second = 1.0;
  RetryPolicy retry;
};

/// Routes queries to registered engines with caching, fixture record/replay,
/// a per-engine rate limiter and retries. Safe for concurrent use.
class SearchService {
 public:
  explicit SearchService(SearchOptions options = {});

  void register_engine(Engine engine, std::shared_ptr<SearchEngineClient> client);

  // At most n results in engine order, ranks renumbered 1..m.
  std::vector<SearchResult> search(Engine engine, const std::string& query, int n);

  std::size_t engine_calls() const { return engine_calls_.load(); }

 private:
  std::optional<std::vector<SearchResult>> read_fixture(Engine engine, const std::string& query, int n);
  void write_fixture(Engine engine, const std::string& query, int n, const std::vector<SearchResult>& results);

  SearchOptions options_;
  std::mutex mu_;
  std::map<Engine, std::shared_ptr<SearchEngineClient>> engines_;
  std::map<Engine, std::shared_ptr<RateLimiter>> limiters_;
  std::map<std::string, std::vector<SearchResult>> memory_;
  KeyedMutex key_locks_;
  std::atomic<std::size_t> engine_calls_{0};
};

}  // namespace hallucorrect
