//
// Copyright 2026 The fairdial Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef FAIRDIAL_PARALLEL_HPP_
#define FAIRDIAL_PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace fairdial {

inline std::size_t default_workers() {
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

struct TaskFailure {
  std::size_t index = 0;
  std::exception_ptr error;
};

// Calls f(i) for every i in [0, n) on up to `workers` threads. Indices are
// handed out in increasing order; after a failure no new index is started.
// Returns the failure with the lowest index, if any.
template <typename F>
std::optional<TaskFailure> parallel_for(std::size_t n, std::size_t workers,
                                        F&& f) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::optional<TaskFailure> failure;

  auto body = [&] {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure || i < failure->index) {
          failure = TaskFailure{i, std::current_exception()};
        }
        stop.store(true);
      }
    }
  };

  if (workers == 1) {
    body();
    return failure;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  return failure;
}

}  // namespace fairdial

#endif  // FAIRDIAL_PARALLEL_HPP_
