#include "hallucorrect/http.h"

#include <httplib.h>

#include <cctype>

#include "hallucorrect/errors.h"

namespace hallucorrect {

namespace {

constexpr const char* kUserAgent =
    "Mozilla/5.0 (X11; Linux x86_64) AppleWebKit/537.36 (KHTML, like Gecko) "
    "Chrome/120.0 Safari/537.36";

class HttplibClient : public HttpClient {
 public:
  explicit HttplibClient(std::chrono::seconds timeout) : timeout_(timeout) {}

  HttpResponse send(const HttpRequest& request) override {
    Url url = parse_url(request.url);
    std::string origin = url.scheme + "://" + url.host + ":" + std::to_string(url.port);
    httplib::Client client(origin);
    client.set_follow_location(true);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);

    httplib::Headers headers;
    bool has_agent = false;
    for (const auto& [k, v] : request.headers) {
      has_agent = has_agent || k == "User-Agent";
      headers.emplace(k, v);
    }
    if (!has_agent) headers.emplace("User-Agent", kUserAgent);

    httplib::Result res;
    if (request.method == "POST") {
      auto type = request.content_type.empty() ? std::string("application/json") : request.content_type;
      res = client.Post(url.path, headers, request.body, type);
    } else {
      res = client.Get(url.path, headers);
    }
    if (!res) {
      throw Error(ErrorCode::kNetwork, request.url + ": " + httplib::to_string(res.error()));
    }
    HttpResponse out;
    out.status = res->status;
    out.body = res->body;
    out.content_type = res->get_header_value("Content-Type");
    return out;
  }

 private:
  std::chrono::seconds timeout_;
};

}  // namespace

std::shared_ptr<HttpClient> make_http_client(std::chrono::seconds timeout) {
  return std::make_shared<HttplibClient>(timeout);
}

Url parse_url(std::string_view text) {
  Url url;
  auto scheme_end = text.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error(ErrorCode::kInvalidArgument, "malformed url: '" + std::string(text) + "'");
  }
  for (char c : text.substr(0, scheme_end)) url.scheme.push_back(static_cast<char>(std::tolower(c)));
  if (url.scheme != "http" && url.scheme != "https") {
    throw Error(ErrorCode::kInvalidArgument, "unsupported url scheme: '" + std::string(text) + "'");
  }
  auto rest = text.substr(scheme_end + 3);
  auto path_start = rest.find_first_of("/?#");
  auto authority = rest.substr(0, path_start);
  if (auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);
  url.port = url.scheme == "https" ? 443 : 80;
  if (auto colon = authority.rfind(':'); colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    auto port = authority.substr(colon + 1);
    if (port.empty() || port.find_first_not_of("0123456789") != std::string_view::npos) {
      throw Error(ErrorCode::kInvalidArgument, "malformed url port: '" + std::string(text) + "'");
    }
    url.port = std::stoi(std::string(port));
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "url has no host: '" + std::string(text) + "'");
  }
  url.host = std::string(authority);
  url.path = path_start == std::string_view::npos ? "/" : std::string(rest.substr(path_start));
  if (auto hash = url.path.find('#'); hash != std::string::npos) url.path.resize(hash);
  if (url.path.empty() || url.path.front() != '/') url.path.insert(url.path.begin(), '/');
  return url;
}

std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

std::string url_decode(std::string_view s) {
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      int hi = hex(s[i + 1]);
      int lo = hex(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
        continue;
      }
    }
    out.push_back(s[i] == '+' ? ' ' : s[i]);
  }
  return out;
}

}  // namespace hallucorrect
