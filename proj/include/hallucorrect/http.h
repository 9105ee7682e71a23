#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hallucorrect {

struct HttpRequest {
  std::string method = "GET";
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  std::string content_type;
};

struct HttpResponse {
  int status = 0;
  std::string body;
  std::string content_type;
};

// Transport seam. Implementations throw Error{kNetwork} when no response
// was received at all; HTTP error statuses are returned, not thrown.
class HttpClient {
 public:
  virtual ~HttpClient() = default;
  virtual HttpResponse send(const HttpRequest& request) = 0;
};

std::shared_ptr<HttpClient> make_http_client(std::chrono::seconds timeout = std::chrono::seconds(15));

struct Url {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path;  // includes the query string
};

// Throws Error{kInvalidArgument} unless the url is absolute http(s).
Url parse_url(std::string_view url);

std::string url_encode(std::string_view s);
std::string url_decode(std::string_view s);

}  // namespace hallucorrect
