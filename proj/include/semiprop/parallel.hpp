// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace semiprop {

/// Worker count: `requested` when positive, else SEMIPROP_THREADS, else 1.
int resolve_threads(int requested);

/// Calls f(i) for i in [0, count) on up to `threads` workers. If any call
/// throws, the exception of the lowest failing index is rethrown.
template <class F>
void parallel_for(std::size_t count, int threads, F&& f) {
  const std::size_t workers = std::min<std::size_t>(threads > 0 ? threads : 1, count);
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            f(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace semiprop
