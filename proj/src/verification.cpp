// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "semiprop/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "semiprop/errors.hpp"
#include "semiprop/parallel.hpp"

namespace semiprop {

namespace {

// Step count for a uniform grid at least twice as fine as the adaptive one,
// so every stencil point is integrated with the same smooth scheme.
int smooth_steps(const ClassicalPath& centre) {
  return std::max(64, 2 * static_cast<int>(centre.grid().size() - 1));
}

double budget_for(const std::vector<double>& budgets, int k) {
  if (budgets.empty()) return 0.0;
  return budgets[std::min<std::size_t>(k, budgets.size() - 1)];
}

struct Probe {
  double t;
  Vec q1;
};

std::vector<double> residual_at_step(const PotentialSpec& spec, double t, const Vec& q0, const Vec& q1, int loops,
                                     const Vec& v_guess, double h, const SeriesOptions& series) {
  const int n = spec.dimension();
  std::vector<Probe> probes{{t, q1}, {t + h, q1}, {t - h, q1}};
  for (int i = 0; i < n; ++i) {
    Vec up = q1, down = q1;
    up[i] += h;
    down[i] -= h;
    probes.push_back({t, up});
    probes.push_back({t, down});
  }
  std::vector<HbarSeries> v(probes.size());
  const int threads = resolve_threads(series.threads);
  SeriesOptions inner = series;
  inner.threads = 1;
  parallel_for(probes.size(), threads, [&](std::size_t p) {
    v[p] = compute_V(spec, probes[p].t, q0, probes[p].q1, loops, v_guess, inner).v;
  });

  auto grad = [&](int k) {
    Vec g(n);
    for (int i = 0; i < n; ++i) g[i] = (v[3 + 2 * i][k] - v[4 + 2 * i][k]) / (2 * h);
    return g;
  };
  auto lap = [&](int k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += (v[3 + 2 * i][k] - 2 * v[0][k] + v[4 + 2 * i][k]) / (h * h);
    return s;
  };
  std::vector<Vec> grads;
  for (int k = 0; k <= loops; ++k) grads.push_back(grad(k));
  const Vec b = spec.B(q1);
  std::vector<double> out;
  for (int k = 0; k <= loops; ++k) {
    const double dt = (v[1][k] - v[2][k]) / (2 * h);
    double rhs = b.dot(grads[k]);
    for (int a = 0; a <= k; ++a) rhs += 0.5 * grads[a].dot(grads[k - a]);
    if (k >= 1) rhs += 0.5 * lap(k - 1);
    if (k == 1) rhs += 0.5 * spec.div_B(q1);
    if (k == 0) rhs += 0.5 * b.squaredNorm() + spec.eval_C(q1);
    out.push_back(dt - rhs);
  }
  return out;
}

}  // namespace

bool ResidualReport::within_budget() const {
  for (std::size_t k = 0; k < orders.size(); ++k)
    if (!(orders[k] < budgets[k])) return false;
  return true;
}

ResidualReport schrodinger_residual(const PotentialSpec& spec, double t, const Vec& q0, const Vec& q1, int loops,
                                    const std::optional<Vec>& guess, const ResidualOptions& opts) {
  ResidualReport report;
  const double h = opts.h > 0 ? opts.h : 1e-3 * std::max({1.0, q1.cwiseAbs().maxCoeff(), t});
  if (h >= t) throw std::invalid_argument("finite-difference step must be smaller than t");
  const ClassicalPath centre = shoot(spec, t, q0, q1, guess, opts.series.shoot);
  SeriesOptions series = opts.series;
  series.shoot.integrator.fixed_steps = smooth_steps(centre);
  const Vec v_guess = centre.v0();

  auto signed_res = residual_at_step(spec, t, q0, q1, loops, v_guess, h, series);
  if (opts.richardson) {
    const auto half = residual_at_step(spec, t, q0, q1, loops, v_guess, 0.5 * h, series);
    for (std::size_t k = 0; k < signed_res.size(); ++k) signed_res[k] = (4 * half[k] - signed_res[k]) / 3;
  }
  report.signed_orders = signed_res;
  for (std::size_t k = 0; k < signed_res.size(); ++k) {
    report.orders.push_back(std::abs(signed_res[k]));
    report.budgets.push_back(budget_for(opts.budgets, static_cast<int>(k)));
  }
  report.fd_step = h;
  report.quadrature_tol = opts.series.quadrature.tol;
  report.fixed_steps = series.shoot.integrator.fixed_steps;
  std::ostringstream g;
  g << "central differences in (t, q1), " << (3 + 2 * spec.dimension()) << " points"
    << (opts.richardson ? ", Richardson h and h/2" : "");
  report.grid = g.str();
  return report;
}

HamiltonJacobiReport hamilton_jacobi_residual(const ClassicalPath& path, double h, const ShootOptions& opts) {
  const auto& spec = path.spec();
  const int n = path.dimension();
  const double t = path.duration();
  const Vec q0 = path.q0(), q1 = path.q_end(), v0 = path.v0();
  ShootOptions smooth = opts;
  smooth.integrator.fixed_steps = smooth_steps(path);
  auto minus_s = [&](double tt, const Vec& a, const Vec& b) { return -action(shoot(spec, tt, a, b, v0, smooth)); };

  const double dt = (minus_s(t + h, q0, q1) - minus_s(t - h, q0, q1)) / (2 * h);
  Vec g0(n), g1(n);
  for (int i = 0; i < n; ++i) {
    Vec up = q0, down = q0;
    up[i] += h;
    down[i] -= h;
    g0[i] = (minus_s(t, up, q1) - minus_s(t, down, q1)) / (2 * h);
    up = q1;
    down = q1;
    up[i] += h;
    down[i] -= h;
    g1[i] = (minus_s(t, q0, up) - minus_s(t, q0, down)) / (2 * h);
  }
  HamiltonJacobiReport r;
  r.fd_step = h;
  r.at_q0 = dt - (0.5 * (g0 - spec.B(q0)).squaredNorm() + spec.eval_C(q0));
  r.at_q1 = dt - (0.5 * (g1 + spec.B(q1)).squaredNorm() + spec.eval_C(q1));
  return r;
}

std::optional<double> fit_log_slope(const std::vector<double>& x, const std::vector<double>& y, double floor) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (y[i] > floor) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2) return std::nullopt;
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

bool ShortTimeReport::within_budget() const {
  auto at_least = [](const std::optional<double>& s, double rate) { return !s || *s >= 0.8 * rate; };
  return at_least(slope_a, 1.0) && at_least(slope_b, 1.0) && at_least(slope_c, 2.0) && d_monotone;
}

ShortTimeReport short_time_suite(const PotentialSpec& spec, const Vec& q1, const std::vector<double>& t_list,
                                 const ShortTimeOptions& opts) {
  const int n = spec.dimension();
  ShortTimeReport report;
  report.rows.resize(t_list.size());
  parallel_for(t_list.size(), resolve_threads(opts.series.threads), [&](std::size_t i) {
    const double t = t_list[i];
    auto [q0, path] = stationary_source_point(spec, t, q1, opts.shoot);
    const JacobiFrame frame = jacobi_frame(path);
    const HessianBlocks h = mixed_hessian(frame);
    ShortTimeRow row;
    row.t = t;
    row.q0 = q0;
    row.dev_a = (t * h.s01 - Mat::Identity(n, n)).norm();
    row.dev_b = std::abs(action(path));
    row.dev_c = (q1 - q0 + t * spec.B(q0)).norm();
    row.ratio_d = std::sqrt(std::abs(h.s01.determinant()) / std::abs(h.s00.determinant()));
    row.dev_d = std::abs(row.ratio_d - 1.0);
    if (opts.record_v2) {
      SeriesOptions inner = opts.series;
      inner.threads = 1;
      row.v2 = series_along(path, 2, inner).v[2];
    }
    report.rows[i] = std::move(row);
  });

  std::vector<double> ts, a, b, c, d;
  for (const auto& r : report.rows) {
    ts.push_back(r.t);
    a.push_back(r.dev_a);
    b.push_back(r.dev_b);
    c.push_back(r.dev_c);
    d.push_back(r.dev_d);
  }
  report.slope_a = fit_log_slope(ts, a, opts.floor);
  report.slope_b = fit_log_slope(ts, b, opts.floor);
  report.slope_c = fit_log_slope(ts, c, opts.floor);
  report.slope_d = fit_log_slope(ts, d, opts.floor);
  // The ratio must approach 1 as t decreases.
  std::vector<std::size_t> order(ts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return ts[x] > ts[y]; });
  report.d_monotone = true;
  for (std::size_t k = 1; k < order.size(); ++k)
    if (d[order[k]] > d[order[k - 1]] && d[order[k]] > opts.floor) report.d_monotone = false;
  return report;
}

SemigroupReport semigroup_leading_check(const PotentialSpec& spec, double t0, double t1, const Vec& q0,
                                        const Vec& q1, const std::optional<Vec>& guess, const ShootOptions& opts) {
  const ClassicalPath full = shoot(spec, t0 + t1, q0, q1, guess, opts);
  const auto mid = full.at(t0);

  // Newton on q for d/dq [S0(t0,q0,q) + S1(t1,q,q1)] = v_first(t0) - v_second(0).
  Vec q = mid.q;
  Vec guess0 = full.v0(), guess1 = mid.v;
  auto legs = [&](const Vec& qs) {
    auto a = shoot(spec, t0, q0, qs, guess0, opts);
    auto b = shoot(spec, t1, qs, q1, guess1, opts);
    return std::pair{std::move(a), std::move(b)};
  };
  auto [first, second] = legs(q);
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Vec grad = first.v_end() - second.v0();
    if (grad.cwiseAbs().maxCoeff() < 1e-13 * std::max(1.0, first.v_end().cwiseAbs().maxCoeff())) break;
    const auto h0 = mixed_hessian(jacobi_frame(first));
    const auto h1 = mixed_hessian(jacobi_frame(second));
    const Mat hess = h0.s11 + h1.s00;
    q -= hess.fullPivLu().solve(grad);
    guess0 = first.v0();
    guess1 = second.v0();
    std::tie(first, second) = legs(q);
  }
  const auto hf = mixed_hessian(jacobi_frame(full));
  const auto h0 = mixed_hessian(jacobi_frame(first));
  const auto h1 = mixed_hessian(jacobi_frame(second));
  const Mat hess = h0.s11 + h1.s00;

  SemigroupReport r;
  r.q_star = q;
  r.action_full = action(full);
  r.action_legs = action(first) + action(second);
  r.action_defect = std::abs(r.action_full - r.action_legs);
  r.vanvleck_full = std::sqrt(std::abs(hf.s01.determinant()));
  r.vanvleck_composed = std::sqrt(std::abs(h0.s01.determinant()) * std::abs(h1.s01.determinant()) /
                                  std::abs(hess.determinant()));
  r.vanvleck_defect = std::abs(r.vanvleck_full - r.vanvleck_composed);
  r.morse_full = morse_index(full);
  r.morse_first = morse_index(first);
  r.morse_second = morse_index(second);
  const Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (hess + hess.transpose()));
  r.hessian_index = static_cast<int>((eig.eigenvalues().array() < 0.0).count());
  return r;
}

}  // namespace semiprop
