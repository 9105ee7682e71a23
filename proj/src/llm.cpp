#include "hallucorrect/llm.h"

#include <chrono>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "hallucorrect/digest.h"
#include "hallucorrect/errors.h"
#include "hallucorrect/serialize.h"

namespace hallucorrect {

namespace fs = std::filesystem;
using nlohmann::json;

std::string cache_key(const CompletionRequest& request) {
  json key = json::array({request.backend_id, request.prompt, request.temperature, request.max_output_length});
  return sha256_hex(to_text(key));
}

CompletionCache::CompletionCache(std::optional<fs::path> dir) : dir_(std::move(dir)) {
  if (dir_) fs::create_directories(*dir_);
}

std::optional<std::string> CompletionCache::get(const std::string& key) {
  {
    std::lock_guard lock(mu_);
    if (auto it = memory_.find(key); it != memory_.end()) return it->second;
  }
  if (!dir_) return std::nullopt;
  auto path = *dir_ / key.substr(0, 2) / (key + ".json");
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    auto text = json::parse(buf.str()).at("text").get<std::string>();
    std::lock_guard lock(mu_);
    memory_.emplace(key, text);
    return text;
  } catch (const json::exception& e) {
    spdlog::warn("ignoring corrupt cache entry {}: {}", path.string(), e.what());
    return std::nullopt;
  }
}

void CompletionCache::put(const std::string& key, const CompletionRequest& request, const std::string& text) {
  {
    std::lock_guard lock(mu_);
    memory_[key] = text;
  }
  if (!dir_) return;
  auto dir = *dir_ / key.substr(0, 2);
  fs::create_directories(dir);
  json entry{{"backend_id", request.backend_id},
             {"prompt", request.prompt},
             {"temperature", request.temperature},
             {"max_output_length", request.max_output_length},
             {"text", text}};
  thread_local std::mt19937_64 rng{std::random_device{}()};
  auto tmp = dir / (key + ".tmp" + std::to_string(rng()));
  {
    std::ofstream out(tmp, std::ios::binary);
    out << to_text(entry, 2);
  }
  fs::rename(tmp, dir / (key + ".json"));
}

LlmGateway::LlmGateway(GatewayOptions options)
    : options_(std::move(options)),
      cache_(options_.use_cache ? options_.cache_dir : std::nullopt) {}

void LlmGateway::register_backend(const std::string& id, std::shared_ptr<LlmBackend> backend) {
  std::lock_guard lock(mu_);
  backends_[id] = Slot{std::move(backend), std::make_shared<Semaphore>(std::max<std::size_t>(1, options_.max_in_flight))};
}

bool LlmGateway::has_backend(const std::string& id) const {
  std::lock_guard lock(mu_);
  return backends_.count(id) > 0;
}

LlmGateway::Slot LlmGateway::slot(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = backends_.find(id);
  if (it == backends_.end()) {
    throw Error(ErrorCode::kConfig, "no backend registered under '" + id + "'");
  }
  return it->second;
}

std::string LlmGateway::call_backend(const Slot& backend, const CompletionRequest& request, int& attempts) {
  SemaphoreGuard guard(*backend.in_flight);
  ++backend_requests_;
  try {
    return with_retry(
        options_.retry,
        [&] {
          ++backend_attempts_;
          return backend.backend->complete(request);
        },
        attempts,
        [&](int attempt, const Error& e, std::chrono::milliseconds wait) {
          spdlog::warn("{}: attempt {}/{} failed ({}); retrying in {} ms", request.backend_id, attempt,
                       options_.retry.max_attempts, e.what(), wait.count());
        });
  } catch (const Error& e) {
    if (!e.retryable()) throw;
    throw Error(ErrorCode::kBackendUnavailable, request.backend_id + ": giving up after " +
                                                    std::to_string(attempts) + " attempts: " + e.what());
  }
}

CompletionResult LlmGateway::complete(const CompletionRequest& request) {
  if (request.temperature < 0) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be >= 0");
  }
  auto backend = slot(request.backend_id);
  auto start = std::chrono::steady_clock::now();

  CompletionResult result;
  result.backend_id = request.backend_id;

  std::optional<std::string> key;
  std::unique_lock<std::mutex> key_lock;
  if (options_.use_cache) {
    key = cache_key(request);
    key_lock = key_locks_.lock(*key);
    if (auto hit = cache_.get(*key)) {
      result.text = std::move(*hit);
      result.from_cache = true;
    }
  }
  if (!result.from_cache) {
    result.text = call_backend(backend, request, result.attempts);
    if (result.attempts > 1) {
      spdlog::info("{}: succeeded after {} attempts", request.backend_id, result.attempts);
    }
    if (key) cache_.put(*key, request, result.text);
  }
  result.latency_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace hallucorrect
