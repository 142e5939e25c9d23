// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "semiprop/diagrams.hpp"
#include "semiprop/jacobi.hpp"

namespace semiprop {

/// Vertex factor at a point of the path.
///
/// Unmarked: d^alpha C - (d^alpha B_k) v^k, alpha given by `axes`.
/// Marked: -d^{alpha'} B_{axes[0]}, where axes[0] is the index on the marked
/// half-edge and alpha' collects the remaining axes.
double vertex_weight(const PotentialSpec& spec, const Vec& q, const Vec& v, std::span<const int> axes,
                     bool marked);

/// True when the vertex factor is the zero polynomial for these axes.
bool vertex_weight_vanishes(const PotentialSpec& spec, std::span<const int> axes, bool marked);

enum class EdgeMarks { none, first, both };

struct EdgeValue {
  double smooth = 0.0;
  /// Present only for doubly marked edges: coefficient of delta(s - u).
  std::optional<double> delta_coeff;
};

/// Propagator for an edge with index i at time s and j at time u. A single
/// mark sits on the first end (derivative in s).
EdgeValue edge_kernel(const GreenKernel& kernel, EdgeMarks marks, int i, int j, double s, double u);

struct QuadratureOptions {
  /// Gauss-Legendre nodes per dimension; the check rule uses nodes + refine.
  int nodes = 24;
  int refine = 8;
  /// Above this many time variables, randomized quasi-Monte Carlo is used.
  int max_gauss_dim = 3;
  std::uint64_t qmc_samples = 1 << 14;
  std::uint64_t seed = 1;
  /// Accepted disagreement, relative to max(1, |value|).
  double tol = 1e-8;
  double qmc_tol = 1e-3;
};

struct DiagramValue {
  double value = 0.0;
  double est_error = 0.0;
  /// Index labelings that survive structural pruning.
  std::int64_t n_labelings = 0;
  /// Order simplices integrated, summed over delta expansions.
  std::int64_t n_simplices = 0;
};

/// Value of a closed marked diagram along the kernel's path: the sum over
/// index labelings of the integral over vertex times. Throws
/// QuadratureNotConverged when the two rules disagree beyond tolerance.
DiagramValue evaluate(const GreenKernel& kernel, const MarkedDiagram& md, const QuadratureOptions& opts = {});

}  // namespace semiprop
