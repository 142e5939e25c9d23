// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "semiprop/evaluation.hpp"

namespace semiprop {

/// Truncated power series sum_k coeffs[k] x^k in the variable x = i*hbar.
struct HbarSeries {
  std::vector<double> coeffs;

  HbarSeries() = default;
  explicit HbarSeries(std::vector<double> c) : coeffs(std::move(c)) {}
  static HbarSeries zero(int order) { return HbarSeries(std::vector<double>(order + 1, 0.0)); }
  int order() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
  double operator[](int k) const { return k <= order() ? coeffs[k] : 0.0; }
};

/// Truncated to the smaller of the two orders.
HbarSeries series_add(const HbarSeries& a, const HbarSeries& b);
HbarSeries series_mul(const HbarSeries& a, const HbarSeries& b);
/// exp(s) for a series with zero constant term; throws otherwise.
HbarSeries series_exp(const HbarSeries& s);

/// 1/2 log|det d^2(-S)/dq0 dq1|.
double logdet_half(const JacobiFrame& frame);

struct SeriesOptions {
  ShootOptions shoot;
  QuadratureOptions quadrature;
  /// Worker cap for diagram evaluation; 0 defers to SEMIPROP_THREADS.
  int threads = 0;
};

struct DiagramTerm {
  std::string key;
  int loops = 0;
  std::int64_t aut = 1;
  DiagramValue value;
  double contribution = 0.0;  // value / aut
};

struct SeriesResult {
  HbarSeries v;
  double action = 0.0;
  double logdet = 0.0;
  Vec v0;
  int iterations = 0;
  double terminal_error = 0.0;
  std::vector<DiagramTerm> diagrams;
};

/// Connected marked diagrams with 2 <= loops <= max_loops, with loop numbers
/// and automorphism orders. Enumerated once per process and shared.
struct CatalogEntry {
  MarkedDiagram diagram;
  std::string key;
  int loops;
  std::int64_t aut;
};
const std::vector<CatalogEntry>& diagram_catalog(int max_loops);

/// Coefficients v_0..v_L of V along an already solved path.
SeriesResult series_along(const ClassicalPath& path, int loops, const SeriesOptions& opts = {});

/// Shoots the path from q0 to q1 in time t and expands V to order L.
SeriesResult compute_V(const PotentialSpec& spec, double t, const Vec& q0, const Vec& q1, int loops,
                       const std::optional<Vec>& guess = std::nullopt, const SeriesOptions& opts = {});

/// U = exp(phase / (i hbar)) * vanvleck * correction, with correction the
/// exponential of sum_{k>=2} v_k (i hbar)^(k-1).
struct PropagatorParts {
  double phase = 0.0;
  double vanvleck = 0.0;
  HbarSeries correction;
};
PropagatorParts propagator_parts(const SeriesResult& series);
PropagatorParts propagator_parts(const PotentialSpec& spec, double t, const Vec& q0, const Vec& q1, int loops,
                                 const std::optional<Vec>& guess = std::nullopt, const SeriesOptions& opts = {});

}  // namespace semiprop
