// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "semiprop/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>

namespace semiprop {

namespace {

QuadratureRule build_gauss_legendre(int n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1,1] -> [0,1].
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::uint64_t k, int base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (k > 0) {
    r += f * static_cast<double>(k % base);
    k /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

const QuadratureRule& gauss_legendre(int n) {
  if (n < 1 || n > 512) throw std::invalid_argument("Gauss-Legendre order out of range");
  static std::mutex mutex;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
  return it->second;
}

ShiftedHalton::ShiftedHalton(int dim, std::uint64_t seed) {
  if (dim < 1 || dim > static_cast<int>(std::size(kPrimes)))
    throw std::invalid_argument("Halton dimension out of range");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  shift_.resize(dim);
  for (auto& s : shift_) s = u(rng);
}

void ShiftedHalton::point(std::uint64_t k, std::vector<double>& out) const {
  out.resize(shift_.size());
  for (std::size_t d = 0; d < shift_.size(); ++d) {
    double x = radical_inverse(k, kPrimes[d]) + shift_[d];
    out[d] = x - std::floor(x);
  }
}

}  // namespace semiprop
