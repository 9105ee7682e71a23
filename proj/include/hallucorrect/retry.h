#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <thread>

#include "hallucorrect/errors.h"

namespace hallucorrect {

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double multiplier = 2.0;
};

// Runs `fn` until it succeeds, a non-retryable Error escapes, or the
// attempts run out. `attempts` receives the number of calls made.
template <typename Fn>
auto with_retry(const RetryPolicy& policy, Fn&& fn, int& attempts,
                const std::function<void(int, const Error&, std::chrono::milliseconds)>& on_retry = {})
    -> decltype(fn()) {
  auto backoff = policy.initial_backoff;
  for (attempts = 1;; ++attempts) {
    try {
      return fn();
    } catch (const Error& e) {
      if (!e.retryable() || attempts >= policy.max_attempts) throw;
      if (on_retry) on_retry(attempts, e, backoff);
      if (backoff.count() > 0) std::this_thread::sleep_for(backoff);
      backoff = std::chrono::milliseconds(static_cast<long long>(backoff.count() * policy.multiplier));
    }
  }
}

}  // namespace hallucorrect
