#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace hallucorrect {

// Counting semaphore with a runtime bound.
class Semaphore {
 public:
  explicit Semaphore(std::size_t permits) : permits_(permits) {}

  void acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return permits_ > 0; });
    --permits_;
  }

  void release() {
    {
      std::lock_guard lock(mu_);
      ++permits_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::size_t permits_;
};

class SemaphoreGuard {
 public:
  explicit SemaphoreGuard(Semaphore& s) : s_(s) { s_.acquire(); }
  ~SemaphoreGuard() { s_.release(); }
  SemaphoreGuard(const SemaphoreGuard&) = delete;
  SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;

 private:
  Semaphore& s_;
};

// Spaces calls at least 1/rate seconds apart. rate <= 0 disables limiting.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second);

  void wait();

 private:
  std::mutex mu_;
  std::chrono::steady_clock::duration interval_{};
  std::chrono::steady_clock::time_point next_{};
};

// One mutex per string key; entries are created on demand and kept.
class KeyedMutex {
 public:
  std::unique_lock<std::mutex> lock(const std::string& key) {
    std::shared_ptr<std::mutex> m;
    {
      std::lock_guard guard(mu_);
      auto& slot = locks_[key];
      if (!slot) slot = std::make_shared<std::mutex>();
      m = slot;
    }
    return std::unique_lock<std::mutex>(*m);
  }

 private:
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
};

}  // namespace hallucorrect
