#include "hallucorrect/fetch.h"

#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hallucorrect/digest.h"
#include "hallucorrect/errors.h"
#include "hallucorrect/serialize.h"
#include "hallucorrect/html_extract.h"
#include "hallucorrect/text_util.h"

namespace hallucorrect {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path page_fixture_path(const fs::path& dir, const std::string& url) {
  return dir / "pages" / (sha256_hex(url) + ".json");
}

PageFetcher::PageFetcher(std::shared_ptr<HttpClient> http, FetchOptions options)
    : http_(std::move(http)), options_(std::move(options)) {}

HttpResponse PageFetcher::fetch_raw(const std::string& url) {
  std::optional<fs::path> fixture;
  if (options_.fixture_dir && options_.mode != FixtureMode::kLive) {
    fixture = page_fixture_path(*options_.fixture_dir, url);
    std::ifstream in(*fixture, std::ios::binary);
    if (in) {
      std::stringstream buf;
      buf << in.rdbuf();
      try {
        auto j = json::parse(buf.str());
        return HttpResponse{j.at("status").get<int>(), j.at("body").get<std::string>(),
                            j.value("content_type", "text/html")};
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kParse, "bad page fixture " + fixture->string() + ": " + e.what());
      }
    }
    if (options_.mode == FixtureMode::kReplay) {
      throw Error(ErrorCode::kFixtureMissing, "no recorded page for " + url);
    }
  }
  if (!http_) throw Error(ErrorCode::kConfig, "page fetcher has no HTTP client");

  HttpRequest req;
  req.url = url;
  req.headers.emplace_back("Accept", "text/html,application/xhtml+xml");
  int attempts = 0;
  auto response = with_retry(
      options_.retry,
      [&] {
        auto r = http_->send(req);
        if (r.status == 429 || r.status >= 500) {
          throw Error(ErrorCode::kTransient, url + ": HTTP " + std::to_string(r.status));
        }
        return r;
      },
      attempts);

  if (fixture && options_.mode == FixtureMode::kRecord) {
    fs::create_directories(fixture->parent_path());
    json j{{"url", url}, {"status", response.status}, {"content_type", response.content_type},
           {"body", response.body}};
    thread_local std::mt19937_64 rng{std::random_device{}()};
    auto tmp = *fixture;
    tmp += ".tmp" + std::to_string(rng());
    {
      std::ofstream out(tmp, std::ios::binary);
      out << to_text(j, 2);
    }
    fs::rename(tmp, *fixture);
  }
  return response;
}

FetchedPage PageFetcher::fetch_and_extract(const std::string& url) {
  parse_url(url);
  FetchedPage page;
  page.url = url;
  HttpResponse response;
  try {
    response = fetch_raw(url);
  } catch (const Error& e) {
    // Server errors that outlived the retries are reported, not thrown.
    if (e.code() != ErrorCode::kTransient) throw;
    page.reason = "http_5xx";
    return page;
  }
  if (response.status != 200) {
    page.reason = "http_" + std::to_string(response.status);
    return page;
  }
  auto type = to_lower_ascii(response.content_type);
  if (!type.empty() && type.find("html") == std::string::npos && type.find("text/plain") == std::string::npos) {
    page.reason = "non_html";
    return page;
  }
  page.text = type.find("text/plain") != std::string::npos ? trim(response.body)
                                                          : extract_article_text(response.body);
  if (page.text.empty()) page.reason = "empty_text";
  return page;
}

}  // namespace hallucorrect
