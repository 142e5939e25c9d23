// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "semiprop/parallel.hpp"

#include <cstdlib>
#include <string>

namespace semiprop {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SEMIPROP_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace semiprop
