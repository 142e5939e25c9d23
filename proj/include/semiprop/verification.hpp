// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semiprop/series.hpp"

namespace semiprop {

struct ResidualOptions {
  /// Finite-difference step; 0 selects 1e-3 * max(1, |q1|, t).
  double h = 0.0;
  /// Combine steps h and h/2 to cancel the O(h^2) stencil error.
  bool richardson = false;
  SeriesOptions series;
  /// Per-order budgets; orders beyond the list use the last entry.
  std::vector<double> budgets = {1e-6, 1e-5, 1e-4, 1e-3};
};

struct ResidualReport {
  /// |r_k| for k = 0..L, r_k the (i hbar)^k coefficient of the residual.
  std::vector<double> orders;
  std::vector<double> signed_orders;
  std::vector<double> budgets;
  double fd_step = 0.0;
  double quadrature_tol = 0.0;
  int fixed_steps = 0;
  std::string grid;
  bool within_budget() const;
};

/// Residual of the equation satisfied by V, order by order in i*hbar, from
/// central differences in (t, q1) over re-solved series.
ResidualReport schrodinger_residual(const PotentialSpec& spec, double t, const Vec& q0, const Vec& q1, int loops,
                                    const std::optional<Vec>& guess = std::nullopt, const ResidualOptions& opts = {});

struct HamiltonJacobiReport {
  /// d(-S)/dt - 1/2|grad_q0(-S) - B(q0)|^2 - C(q0), and the q1 counterpart.
  double at_q0 = 0.0;
  double at_q1 = 0.0;
  double fd_step = 0.0;
  double budget = 1e-6;
  bool within_budget() const { return std::abs(at_q0) < budget && std::abs(at_q1) < budget; }
};

HamiltonJacobiReport hamilton_jacobi_residual(const ClassicalPath& path, double h = 1e-4,
                                              const ShootOptions& opts = {});

struct ShortTimeOptions {
  ShootOptions shoot;
  SeriesOptions series;
  /// Also record v_2 at each stationary source point.
  bool record_v2 = true;
  /// Deviations below this are treated as exact zeros when fitting slopes.
  double floor = 1e-13;
};

struct ShortTimeRow {
  double t = 0.0;
  Vec q0;
  double dev_a = 0.0;  // |t d^2(-S)/dq0 dq1 - I|
  double dev_b = 0.0;  // |S|
  double dev_c = 0.0;  // |q1 - q0 + t B(q0)|
  double ratio_d = 0.0;
  double dev_d = 0.0;  // |ratio_d - 1|
  std::optional<double> v2;
};

struct ShortTimeReport {
  std::vector<ShortTimeRow> rows;
  /// Least-squares slopes of log(dev) against log(t); nullopt when every
  /// deviation is below the floor.
  std::optional<double> slope_a, slope_b, slope_c, slope_d;
  bool d_monotone = false;
  /// Rates guaranteed for any system: (a) and (b) are O(t), (c) is O(t^2).
  bool within_budget() const;
};

ShortTimeReport short_time_suite(const PotentialSpec& spec, const Vec& q1, const std::vector<double>& t_list,
                                 const ShortTimeOptions& opts = {});

struct SemigroupReport {
  Vec q_star;
  double action_full = 0.0, action_legs = 0.0, action_defect = 0.0;
  double vanvleck_full = 0.0, vanvleck_composed = 0.0, vanvleck_defect = 0.0;
  int morse_full = 0, morse_first = 0, morse_second = 0, hessian_index = 0;
  double action_budget = 1e-8;
  double vanvleck_budget = 1e-6;
  bool morse_additive() const { return morse_full == morse_first + morse_second + hessian_index; }
  bool within_budget() const {
    return action_defect < action_budget && vanvleck_defect < vanvleck_budget && morse_additive();
  }
};

/// Splits the path from q0 to q1 of duration t0 + t1 at the stationary
/// intermediate point and checks the leading-order composition law.
SemigroupReport semigroup_leading_check(const PotentialSpec& spec, double t0, double t1, const Vec& q0,
                                        const Vec& q1, const std::optional<Vec>& guess = std::nullopt,
                                        const ShootOptions& opts = {});

/// Least-squares slope of log(y) against log(x) over entries with y > floor.
std::optional<double> fit_log_slope(const std::vector<double>& x, const std::vector<double>& y, double floor);

}  // namespace semiprop
