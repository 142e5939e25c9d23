// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "semiprop/series.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "semiprop/parallel.hpp"

namespace semiprop {

HbarSeries series_add(const HbarSeries& a, const HbarSeries& b) {
  const int L = std::min(a.order(), b.order());
  HbarSeries out = HbarSeries::zero(L);
  for (int k = 0; k <= L; ++k) out.coeffs[k] = a.coeffs[k] + b.coeffs[k];
  return out;
}

HbarSeries series_mul(const HbarSeries& a, const HbarSeries& b) {
  const int L = std::min(a.order(), b.order());
  HbarSeries out = HbarSeries::zero(L);
  for (int k = 0; k <= L; ++k)
    for (int j = 0; j <= k; ++j) out.coeffs[k] += a.coeffs[j] * b.coeffs[k - j];
  return out;
}

HbarSeries series_exp(const HbarSeries& s) {
  if (s.order() < 0) return {};
  if (s.coeffs[0] != 0.0) throw std::invalid_argument("series_exp needs a zero constant term");
  // E' = s' E gives k e_k = sum_{j=1..k} j s_j e_{k-j}.
  const int L = s.order();
  HbarSeries e = HbarSeries::zero(L);
  e.coeffs[0] = 1.0;
  for (int k = 1; k <= L; ++k) {
    double acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += j * s.coeffs[j] * e.coeffs[k - j];
    e.coeffs[k] = acc / k;
  }
  return e;
}

double logdet_half(const JacobiFrame& frame) {
  // d^2(-S)/dq0 dq1 is the inverse of dq(t)/dv0.
  const Mat b = frame.path().end().dq_dv0();
  return -0.5 * std::log(std::abs(b.determinant()));
}

const std::vector<CatalogEntry>& diagram_catalog(int max_loops) {
  static std::mutex mu;
  static std::map<int, std::vector<CatalogEntry>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(max_loops);
  if (it != cache.end()) return it->second;
  std::vector<CatalogEntry> entries;
  if (max_loops >= 2) {
    for (auto& md : enumerate_connected(max_loops)) {
      CatalogEntry e{md, canonical_key(md), loop_number(md.base), automorphism_order(md)};
      entries.push_back(std::move(e));
    }
  }
  return cache.emplace(max_loops, std::move(entries)).first->second;
}

SeriesResult series_along(const ClassicalPath& path, int loops, const SeriesOptions& opts) {
  if (loops < 0 || loops > kMaxLoops) throw std::invalid_argument("loop order must lie in [0, 4]");
  const GreenKernel kernel = green_kernel(path);
  SeriesResult r;
  r.action = action(path);
  r.logdet = logdet_half(kernel.frame());
  r.v0 = path.v0();
  r.iterations = path.iterations;
  r.terminal_error = path.terminal_error;
  r.v = HbarSeries::zero(loops);
  r.v.coeffs[0] = -r.action;
  if (loops >= 1) r.v.coeffs[1] = r.logdet;

  const auto& catalog = diagram_catalog(loops);
  r.diagrams.resize(catalog.size());
  parallel_for(catalog.size(), resolve_threads(opts.threads), [&](std::size_t i) {
    const auto& entry = catalog[i];
    DiagramTerm term{entry.key, entry.loops, entry.aut, {}, 0.0};
    term.value = evaluate(kernel, entry.diagram, opts.quadrature);
    term.contribution = term.value.value / static_cast<double>(entry.aut);
    r.diagrams[i] = std::move(term);
  });
  for (const auto& term : r.diagrams) r.v.coeffs[term.loops] += term.contribution;
  return r;
}

SeriesResult compute_V(const PotentialSpec& spec, double t, const Vec& q0, const Vec& q1, int loops,
                       const std::optional<Vec>& guess, const SeriesOptions& opts) {
  const ClassicalPath path = shoot(spec, t, q0, q1, guess, opts.shoot);
  return series_along(path, loops, opts);
}

PropagatorParts propagator_parts(const SeriesResult& series) {
  PropagatorParts p;
  p.phase = series.v[0];
  p.vanvleck = std::exp(series.logdet);
  const int L = series.v.order();
  HbarSeries exponent = HbarSeries::zero(std::max(0, L - 1));
  for (int k = 2; k <= L; ++k) exponent.coeffs[k - 1] = series.v[k];
  p.correction = series_exp(exponent);
  return p;
}

PropagatorParts propagator_parts(const PotentialSpec& spec, double t, const Vec& q0, const Vec& q1, int loops,
                                 const std::optional<Vec>& guess, const SeriesOptions& opts) {
  return propagator_parts(compute_V(spec, t, q0, q1, loops, guess, opts));
}

}  // namespace semiprop
