#include "hallucorrect/embedding.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hallucorrect/digest.h"
#include "hallucorrect/errors.h"
#include "hallucorrect/serialize.h"

namespace hallucorrect {

namespace fs = std::filesystem;
using nlohmann::json;

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::kInvalidArgument, "cosine: dimension mismatch " + std::to_string(u.size()) + " vs " +
                                                 std::to_string(v.size()));
  }
  double dot = 0.0;
  double nu = 0.0;
  double nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw Error(ErrorCode::kZeroVector, "cosine: zero vector");
  double c = dot / (std::sqrt(nu) * std::sqrt(nv));
  return std::clamp(c, -1.0, 1.0);
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<std::string> tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace

std::vector<Embedding> HashingEmbedder::embed(const std::vector<std::string>& texts) {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    Embedding v(dimension_, 0.0);
    auto add = [&](std::string_view feature, double weight) {
      auto h = fnv1a(feature);
      double sign = (h >> 63) ? -1.0 : 1.0;
      v[h % dimension_] += sign * weight;
    };
    add("<bias>", 0.05);
    auto words = tokens(text);
    for (std::size_t i = 0; i < words.size(); ++i) {
      add("w:" + words[i], 1.0);
      if (i + 1 < words.size()) add("b:" + words[i] + "_" + words[i + 1], 0.5);
      auto padded = "#" + words[i] + "#";
      for (std::size_t k = 0; k + 3 <= padded.size(); ++k) add("c:" + padded.substr(k, 3), 0.2);
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    out.push_back(std::move(v));
  }
  return out;
}

HttpEmbedder::HttpEmbedder(std::shared_ptr<HttpClient> http, std::string base_url, std::string model,
                           std::string api_key)
    : http_(std::move(http)), base_url_(std::move(base_url)), model_(std::move(model)), api_key_(std::move(api_key)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::vector<Embedding> HttpEmbedder::embed(const std::vector<std::string>& texts) {
  if (texts.empty()) return {};
  HttpRequest req;
  req.method = "POST";
  req.url = base_url_ + "/embeddings";
  req.content_type = "application/json";
  req.body = to_text(json{{"model", model_}, {"input", texts}});
  if (!api_key_.empty()) req.headers.emplace_back("Authorization", "Bearer " + api_key_);
  auto res = http_->send(req);
  if (res.status == 401 || res.status == 403) throw Error(ErrorCode::kAuthentication, "embeddings: HTTP 401/403");
  if (res.status != 200) {
    throw Error(ErrorCode::kBackendUnavailable, "embeddings: HTTP " + std::to_string(res.status));
  }
  try {
    auto j = json::parse(res.body);
    std::vector<Embedding> out(texts.size());
    for (const auto& item : j.at("data")) {
      auto index = item.value("index", 0);
      if (index < 0 || static_cast<std::size_t>(index) >= out.size()) continue;
      out[static_cast<std::size_t>(index)] = item.at("embedding").get<Embedding>();
    }
    for (const auto& v : out) {
      if (v.empty() || v.size() != out.front().size()) {
        throw Error(ErrorCode::kBackendUnavailable, "embeddings: incomplete or ragged response");
      }
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBackendUnavailable, std::string("embeddings: ") + e.what());
  }
}

CachingEmbedder::CachingEmbedder(std::shared_ptr<Embedder> inner, std::optional<fs::path> dir)
    : inner_(std::move(inner)), dir_(std::move(dir)) {}

std::vector<Embedding> CachingEmbedder::embed(const std::vector<std::string>& texts) {
  std::vector<Embedding> out(texts.size());
  std::vector<std::string> keys(texts.size());
  std::vector<std::size_t> missing;
  const auto provider = inner_->id();
  {
    std::lock_guard lock(mu_);
    for (std::size_t i = 0; i < texts.size(); ++i) {
      keys[i] = sha256_hex(provider + "\n" + texts[i]);
      if (auto it = memory_.find(keys[i]); it != memory_.end()) {
        out[i] = it->second;
        continue;
      }
      if (dir_) {
        std::ifstream in(*dir_ / provider / (keys[i] + ".json"));
        if (in) {
          std::stringstream buf;
          buf << in.rdbuf();
          out[i] = json::parse(buf.str()).get<Embedding>();
          memory_[keys[i]] = out[i];
          continue;
        }
      }
      missing.push_back(i);
    }
  }
  if (missing.empty()) return out;

  std::vector<std::string> batch;
  batch.reserve(missing.size());
  for (auto i : missing) batch.push_back(texts[i]);
  auto fresh = inner_->embed(batch);
  std::lock_guard lock(mu_);
  misses_ += missing.size();
  for (std::size_t m = 0; m < missing.size(); ++m) {
    auto i = missing[m];
    out[i] = fresh[m];
    memory_[keys[i]] = fresh[m];
    if (dir_) {
      fs::create_directories(*dir_ / provider);
      std::ofstream o(*dir_ / provider / (keys[i] + ".json"));
      o << to_text(json(fresh[m]));
    }
  }
  return out;
}

}  // namespace hallucorrect
