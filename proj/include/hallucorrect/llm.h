#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "hallucorrect/concurrency.h"
#include "hallucorrect/retry.h"

namespace hallucorrect {

struct CompletionRequest {
  std::string backend_id;
  std::string prompt;
  double temperature = 0.0;
  int max_output_length = 512;
};

struct CompletionResult {
  std::string text;
  bool from_cache = false;
  long long latency_ms = 0;
  std::string backend_id;
  int attempts = 0;
};

// A chat-completion provider. Implementations throw Error with
// kTransient/kNetwork (retried), kAuthentication (surfaced at once) or
// kBackendUnavailable.
class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string complete(const CompletionRequest& request) = 0;
};

// Adapts a callable; used for scripted backends in tests and bindings.
class FunctionBackend : public LlmBackend {
 public:
  using Fn = std::function<std::string(const CompletionRequest&)>;
  explicit FunctionBackend(Fn fn) : fn_(std::move(fn)) {}
  std::string complete(const CompletionRequest& request) override { return fn_(request); }

 private:
  Fn fn_;
};

// Digest of (backend_id, prompt, temperature, max_output_length).
std::string cache_key(const CompletionRequest& request);

/// Content-addressed completion store: <dir>/<key[0:2]>/<key>.json.
/// Writes go through a temp file and rename, so readers never see a
/// partial entry.
class CompletionCache {
 public:
  explicit CompletionCache(std::optional<std::filesystem::path> dir);

  std::optional<std::string> get(const std::string& key);
  void put(const std::string& key, const CompletionRequest& request, const std::string& text);

 private:
  std::optional<std::filesystem::path> dir_;
  std::mutex mu_;
  std::map<std::string, std::string> memory_;
};

struct GatewayOptions {
  std::optional<std::filesystem::path> cache_dir;
  bool use_cache = true;
  RetryPolicy retry;
  std::size_t max_in_flight = 4;
};

class LlmGateway {
 public:
  explicit LlmGateway(GatewayOptions options = {});

  void register_backend(const std::string& id, std::shared_ptr<LlmBackend> backend);
  bool has_backend(const std::string& id) const;

  // Identical requests are answered from the cache after the first call.
  // Concurrent identical requests wait for the first one instead of
  // reaching the backend twice.
  CompletionResult complete(const CompletionRequest& request);

  // Requests answered by a backend (cache misses) and total attempts made.
  std::size_t backend_requests() const { return backend_requests_.load(); }
  std::size_t backend_attempts() const { return backend_attempts_.load(); }

 private:
  struct Slot {
    std::shared_ptr<LlmBackend> backend;
    std::shared_ptr<Semaphore> in_flight;
  };

  Slot slot(const std::string& id) const;
  std::string call_backend(const Slot& backend, const CompletionRequest& request, int& attempts);

  GatewayOptions options_;
  CompletionCache cache_;
  KeyedMutex key_locks_;
  mutable std::mutex mu_;
  std::map<std::string, Slot> backends_;
  std::atomic<std::size_t> backend_requests_{0};
  std::atomic<std::size_t> backend_attempts_{0};
};

}  // namespace hallucorrect
