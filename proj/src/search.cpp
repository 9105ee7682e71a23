#include "hallucorrect/search.h"

#include <fstream>
#include <random>
#include <sstream>

#include <spdlog/spdlog.h>

#include "hallucorrect/digest.h"
#include "hallucorrect/errors.h"
#include "hallucorrect/serialize.h"
#include "hallucorrect/html.h"
#include "hallucorrect/text_util.h"

namespace hallucorrect {

namespace fs = std::filesystem;
using nlohmann::json;

void to_json(json& j, const SearchResult& v) {
  j = json{{"rank", v.rank}, {"url", v.url}, {"title", v.title}, {"snippet", v.snippet}};
}

void from_json(const json& j, SearchResult& v) {
  v.rank = j.at("rank").get<int>();
  v.url = j.at("url").get<std::string>();
  v.title = j.value("title", "");
  v.snippet = j.value("snippet", "");
}

namespace {

void check_status(const HttpResponse& r, const char* engine) {
  if (r.status == 200) return;
  auto where = std::string(engine) + ": HTTP " + std::to_string(r.status);
  if (r.status == 429) throw Error(ErrorCode::kQuotaExceeded, where);
  if (r.status == 401) throw Error(ErrorCode::kAuthentication, where);
  if (r.status == 403) {
    // Google and Bing both answer 403 for exhausted quotas.
    auto body = to_lower_ascii(r.body);
    if (body.find("quota") != std::string::npos || body.find("limit") != std::string::npos) {
      throw Error(ErrorCode::kQuotaExceeded, where);
    }
    throw Error(ErrorCode::kAuthentication, where);
  }
  if (r.status >= 500) throw Error(ErrorCode::kTransient, where);
  throw Error(ErrorCode::kBackendUnavailable, where + ": " + r.body.substr(0, 200));
}

json parse_body(std::string_view body, const char* engine) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string(engine) + ": " + e.what());
  }
}

void renumber(std::vector<SearchResult>& results) {
  for (std::size_t i = 0; i < results.size(); ++i) results[i].rank = static_cast<int>(i) + 1;
}

// DDG wraps result links as //duckduckgo.com/l/?uddg=<encoded target>&rut=...
std::string unwrap_ddg_link(std::string_view href) {
  auto pos = href.find("uddg=");
  if (pos == std::string_view::npos) {
    if (href.substr(0, 2) == "//") return "https:" + std::string(href);
    return std::string(href);
  }
  auto value = href.substr(pos + 5);
  value = value.substr(0, value.find('&'));
  return url_decode(value);
}

}  // namespace

std::vector<SearchResult> parse_google_response(std::string_view body, int n) {
  auto j = parse_body(body, "google");
  std::vector<SearchResult> out;
  if (!j.contains("items")) return out;
  for (const auto& item : j["items"]) {
    if (static_cast<int>(out.size()) >= n) break;
    SearchResult r;
    r.url = item.value("link", "");
    r.title = item.value("title", "");
    r.snippet = collapse_whitespace(item.value("snippet", ""));
    if (r.url.empty()) continue;
    out.push_back(std::move(r));
  }
  renumber(out);
  return out;
}

std::vector<SearchResult> parse_bing_response(std::string_view body, int n) {
  auto j = parse_body(body, "bing");
  std::vector<SearchResult> out;
  if (!j.contains("webPages") || !j["webPages"].contains("value")) return out;
  for (const auto& item : j["webPages"]["value"]) {
    if (static_cast<int>(out.size()) >= n) break;
    SearchResult r;
    r.url = item.value("url", "");
    r.title = item.value("name", "");
    r.snippet = collapse_whitespace(item.value("snippet", ""));
    if (r.url.empty()) continue;
    out.push_back(std::move(r));
  }
  renumber(out);
  return out;
}

std::vector<SearchResult> parse_ddg_html(std::string_view html, int n) {
  auto doc = parse_html(html);
  std::vector<const HtmlNode*> blocks;
  find_all(doc, [](const HtmlNode& node) { return node.has_class("result") && !node.has_class("result--ad"); },
           blocks);
  std::vector<SearchResult> out;
  for (const auto* block : blocks) {
    if (static_cast<int>(out.size()) >= n) break;
    auto* link = find_first(*block, [](const HtmlNode& node) { return node.has_class("result__a"); });
    if (!link) continue;
    SearchResult r;
    r.url = unwrap_ddg_link(link->attr("href").value_or(""));
    r.title = text_content(*link);
    if (auto* snip = find_first(*block, [](const HtmlNode& node) { return node.has_class("result__snippet"); })) {
      r.snippet = text_content(*snip);
    }
    if (r.url.empty()) continue;
    out.push_back(std::move(r));
  }
  renumber(out);
  return out;
}

GoogleSearchClient::GoogleSearchClient(std::shared_ptr<HttpClient> http, std::string api_key, std::string engine_id)
    : http_(std::move(http)), api_key_(std::move(api_key)), engine_id_(std::move(engine_id)) {}

std::vector<SearchResult> GoogleSearchClient::query(const std::string& query, int n) {
  // The API serves at most 10 results per request.
  HttpRequest req;
  req.url = "https://www.googleapis.com/customsearch/v1?key=" + url_encode(api_key_) + "&cx=" +
            url_encode(engine_id_) + "&q=" + url_encode(query) + "&num=" + std::to_string(std::min(n, 10));
  auto res = http_->send(req);
  check_status(res, "google");
  return parse_google_response(res.body, n);
}

BingSearchClient::BingSearchClient(std::shared_ptr<HttpClient> http, std::string api_key, std::string endpoint)
    : http_(std::move(http)), api_key_(std::move(api_key)), endpoint_(std::move(endpoint)) {}

std::vector<SearchResult> BingSearchClient::query(const std::string& query, int n) {
  HttpRequest req;
  req.url = endpoint_ + "?q=" + url_encode(query) + "&count=" + std::to_string(n) + "&textDecorations=false";
  req.headers.emplace_back("Ocp-Apim-Subscription-Key", api_key_);
  auto res = http_->send(req);
  check_status(res, "bing");
  return parse_bing_response(res.body, n);
}

DdgSearchClient::DdgSearchClient(std::shared_ptr<HttpClient> http, std::string endpoint)
    : http_(std::move(http)), endpoint_(std::move(endpoint)) {}

std::vector<SearchResult> DdgSearchClient::query(const std::string& query, int n) {
  HttpRequest req;
  req.method = "POST";
  req.url = endpoint_;
  req.body = "q=" + url_encode(query) + "&b=&kl=";
  req.content_type = "application/x-www-form-urlencoded";
  auto res = http_->send(req);
  // DDG signals throttling with 202 and an anomaly page.
  if (res.status == 202) throw Error(ErrorCode::kQuotaExceeded, "ddg: rate limited (HTTP 202)");
  check_status(res, "ddg");
  return parse_ddg_html(res.body, n);
}

FixtureMode parse_fixture_mode(const std::string& s) {
  if (s == "live") return FixtureMode::kLive;
  if (s == "record") return FixtureMode::kRecord;
  if (s == "replay") return FixtureMode::kReplay;
  throw Error(ErrorCode::kInvalidArgument, "unknown fixture mode '" + s + "'");
}

fs::path search_fixture_path(const fs::path& dir, Engine engine, const std::string& query, int n) {
  auto digest = sha256_hex(to_string(engine) + "\n" + query + "\n" + std::to_string(n));
  return dir / "search" / to_string(engine) / (digest + ".json");
}

SearchService::SearchService(SearchOptions options) : options_(std::move(options)) {}

void SearchService::register_engine(Engine engine, std::shared_ptr<SearchEngineClient> client) {
  std::lock_guard lock(mu_);
  engines_[engine] = std::move(client);
  limiters_[engine] = std::make_shared<RateLimiter>(options_.requests_per_second);
}

std::optional<std::vector<SearchResult>> SearchService::read_fixture(Engine engine, const std::string& query,
                                                                     int n) {
  if (!options_.fixture_dir || options_.mode == FixtureMode::kLive) return std::nullopt;
  auto path = search_fixture_path(*options_.fixture_dir, engine, query, n);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str()).at("results").get<std::vector<SearchResult>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, "bad search fixture " + path.string() + ": " + e.what());
  }
}

void SearchService::write_fixture(Engine engine, const std::string& query, int n,
                                  const std::vector<SearchResult>& results) {
  if (!options_.fixture_dir || options_.mode != FixtureMode::kRecord) return;
  auto path = search_fixture_path(*options_.fixture_dir, engine, query, n);
  fs::create_directories(path.parent_path());
  json j{{"engine", to_string(engine)}, {"query", query}, {"n", n}, {"results", results}};
  thread_local std::mt19937_64 rng{std::random_device{}()};
  auto tmp = path;
  tmp += ".tmp" + std::to_string(rng());
  {
    std::ofstream out(tmp, std::ios::binary);
    out << to_text(j, 2);
  }
  fs::rename(tmp, path);
}

std::vector<SearchResult> SearchService::search(Engine engine, const std::string& query, int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "search: n must be >= 1");
  if (trim(query).empty()) throw Error(ErrorCode::kInvalidArgument, "search: empty query");

  auto key = to_string(engine) + "\n" + query + "\n" + std::to_string(n);
  auto key_lock = key_locks_.lock(key);
  {
    std::lock_guard lock(mu_);
    if (auto it = memory_.find(key); it != memory_.end()) return it->second;
  }
  auto results = read_fixture(engine, query, n);
  if (!results) {
    if (options_.mode == FixtureMode::kReplay) {
      throw Error(ErrorCode::kFixtureMissing, "no recorded " + to_string(engine) + " results for '" + query + "'");
    }
    std::shared_ptr<SearchEngineClient> client;
    std::shared_ptr<RateLimiter> limiter;
    {
      std::lock_guard lock(mu_);
      auto it = engines_.find(engine);
      if (it == engines_.end()) {
        throw Error(ErrorCode::kConfig, "search engine '" + to_string(engine) + "' is not configured");
      }
      client = it->second;
      limiter = limiters_[engine];
    }
    int attempts = 0;
    try {
      results = with_retry(
          options_.retry,
          [&] {
            limiter->wait();
            ++engine_calls_;
            return client->query(query, n);
          },
          attempts,
          [&](int attempt, const Error& e, std::chrono::milliseconds wait) {
            spdlog::warn("{} search attempt {} failed ({}); retrying in {} ms", to_string(engine), attempt,
                         e.what(), wait.count());
          });
    } catch (const Error& e) {
      if (!e.retryable()) throw;
      throw Error(ErrorCode::kBackendUnavailable, to_string(engine) + " unavailable: " + e.what());
    }
    if (static_cast<int>(results->size()) > n) results->resize(n);
    renumber(*results);
    write_fixture(engine, query, n, *results);
  }
  std::lock_guard lock(mu_);
  memory_[key] = *results;
  return *results;
}

}  // namespace hallucorrect
