// Copyright 2026 The Manna Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace manna {

/// Worker cap from MANNA_THREADS, else the hardware concurrency.
inline int default_worker_count() {
  if (const char* env = std::getenv("MANNA_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Smallest index in [0, count) for which `pred` returns true, evaluated on
/// up to `threads` workers. Every index below the answer is evaluated, so
/// the result equals the sequential scan. If `pred` throws, the exception
/// from the smallest throwing index wins when it precedes every success.
template <typename Pred>
std::optional<std::size_t> parallel_find_first(std::size_t count, int threads, Pred&& pred) {
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  if (threads <= 1 || count < 2) {
    for (std::size_t k = 0; k < count; ++k)
      if (pred(k)) return k;
    return std::nullopt;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> stop{kNone};
  std::mutex mu;
  std::size_t error_index = kNone;
  std::exception_ptr error;

  auto lower_stop = [&](std::size_t k) {
    std::size_t cur = stop.load();
    while (k < cur && !stop.compare_exchange_weak(cur, k)) {
    }
  };
  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= count || k >= stop.load()) return;
      try {
        if (pred(k)) lower_stop(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (k < error_index) {
          error_index = k;
          error = std::current_exception();
        }
        lower_stop(k);
      }
    }
  };
  const int n = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), count));
  std::vector<std::thread> pool;
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  const std::size_t s = stop.load();
  if (s == kNone) return std::nullopt;
  if (s == error_index) std::rethrow_exception(error);
  return s;
}

}  // namespace manna
