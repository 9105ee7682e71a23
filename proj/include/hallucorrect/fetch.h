#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "hallucorrect/http.h"
#include "hallucorrect/retry.h"
#include "hallucorrect/search.h"

namespace hallucorrect {

struct FetchedPage {
  std::string url;
  std::string text;
  // Empty on success; otherwise why `text` is empty ("http_404", "non_html",
  // "empty_text", ...).
  std::string reason;
};

// Fixture layout: <dir>/pages/<digest(url)>.json with the raw response.
std::filesystem::path page_fixture_path(const std::filesystem::path& dir, const std::string& url);

struct FetchOptions {
  std::optional<std::filesystem::path> fixture_dir;
  FixtureMode mode = FixtureMode::kRecord;
  RetryPolicy retry;
};

class PageFetcher {
 public:
  PageFetcher(std::shared_ptr<HttpClient> http, FetchOptions options = {});

  // Throws Error{kInvalidArgument} for malformed urls and Error{kNetwork}
  // when no response arrives after retries. HTTP errors and non-HTML
  // content come back as empty text with a reason.
  FetchedPage fetch_and_extract(const std::string& url);

 private:
  HttpResponse fetch_raw(const std::string& url);

  std::shared_ptr<HttpClient> http_;
  FetchOptions options_;
};

}  // namespace hallucorrect
