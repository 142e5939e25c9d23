// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace semiprop {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `n` points on [0, 1]. Rules are cached.
const QuadratureRule& gauss_legendre(int n);

/// Randomly shifted Halton point set in [0,1)^dim (Cranley-Patterson rotation).
class ShiftedHalton {
 public:
  ShiftedHalton(int dim, std::uint64_t seed);
  /// Writes the k-th point (k >= 1) into `out`.
  void point(std::uint64_t k, std::vector<double>& out) const;
  int dimension() const noexcept { return static_cast<int>(shift_.size()); }

 private:
  std::vector<double> shift_;
};

}  // namespace semiprop
