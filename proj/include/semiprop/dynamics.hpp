// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "semiprop/potential.hpp"

namespace semiprop {

struct PhaseState {
  Vec q;
  Vec v;
};

struct IntegratorOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  /// When positive, take exactly this many equal steps instead of adapting.
  /// The result is then a smooth function of the initial data and duration,
  /// which finite-difference verification relies on.
  int fixed_steps = 0;
};

struct ShootOptions {
  int max_iterations = 50;
  double bvp_tol = 1e-9;
  /// Relative threshold on the smallest singular value of dq(t)/dv0.
  double singular_tol = 1e-8;
  /// Extra Newton steps after bvp_tol is met; each roughly squares the error.
  int polish_steps = 2;
  IntegratorOptions integrator;
};

/// State of the trajectory and its variational frame at one time.
struct PathSample {
  double tau = 0.0;
  Vec q;
  Vec v;
  /// d(q(tau), v(tau)) / d(q0, v0), a 2n x 2n matrix.
  Mat variational;
  /// Accumulated action from 0 to tau.
  double action = 0.0;

  Mat dq_dq0() const;
  Mat dq_dv0() const;
  Mat dv_dq0() const;
  Mat dv_dv0() const;
};

/// A solution of the Euler-Lagrange equation together with its linearization.
/// Values between grid nodes are produced by one high-order step from the
/// preceding node, so they carry the integrator's accuracy.
class ClassicalPath {
 public:
  ClassicalPath(std::shared_ptr<const PotentialSpec> spec, double duration,
                std::vector<double> grid, std::vector<std::vector<double>> states);

  const PotentialSpec& spec() const noexcept { return *spec_; }
  std::shared_ptr<const PotentialSpec> spec_ptr() const noexcept { return spec_; }
  int dimension() const noexcept { return spec_->dimension(); }
  double duration() const noexcept { return duration_; }
  const std::vector<double>& grid() const noexcept { return grid_; }

  Vec q0() const;
  Vec v0() const;
  /// Position at tau = duration.
  Vec q_end() const;
  Vec v_end() const;

  PathSample at(double tau) const;
  PathSample end() const { return at(duration_); }

  /// Residual of the equation of motion at tau, using the integrated
  /// velocity and a centered difference of the dense output for the
  /// acceleration.
  double eom_residual(double tau, double h) const;

  // Boundary-value metadata; zero for paths produced by flow().
  int iterations = 0;
  double terminal_error = 0.0;

 private:
  PathSample unpack(double tau, const std::vector<double>& x) const;

  std::shared_ptr<const PotentialSpec> spec_;
  double duration_;
  std::vector<double> grid_;
  std::vector<std::vector<double>> states_;
};

ClassicalPath flow(const PotentialSpec& spec, const PhaseState& s0, double t,
                   const IntegratorOptions& opts = {});

/// Solves gamma(0) = q0, gamma(t) = q1 by damped Newton shooting on the
/// initial velocity. The default guess is the straight-line velocity.
ClassicalPath shoot(const PotentialSpec& spec, double t, const Vec& q0, const Vec& q1,
                    const std::optional<Vec>& v_guess = std::nullopt, const ShootOptions& opts = {});

/// Hamilton function S = int_0^t (1/2|v|^2 + B.v - C) along the path.
double action(const ClassicalPath& path);

/// Returns (dS/dq0 + v(0) + B(q0), dS/dq1 - v(t) - B(q1)) with the S-gradients
/// taken by central differences over re-shot neighbours.
std::pair<Vec, Vec> boundary_momentum_residual(const ClassicalPath& path, double h = 1e-4,
                                               const ShootOptions& opts = {});

/// Finds q0 such that the path leaving q0 with velocity -B(q0) reaches q1 at
/// time t. Such q0 are exactly the points where dS/dq0 = 0.
std::pair<Vec, ClassicalPath> stationary_source_point(const PotentialSpec& spec, double t, const Vec& q1,
                                                      const ShootOptions& opts = {});

}  // namespace semiprop
