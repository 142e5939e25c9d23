// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>

#include "semiprop/dynamics.hpp"

namespace semiprop {

/// Jacobi fields phi0 = d gamma / d q0 and phi1 = d gamma / d q1 at one time,
/// together with their time derivatives.
struct JacobiFields {
  double tau = 0.0;
  Vec q;
  Vec v;
  Mat phi0, phi1, dphi0, dphi1;
};

/// Jacobi fields along a classical path, assembled from the variational frame
/// so that phi0(0) = I, phi0(t) = 0, phi1(0) = 0, phi1(t) = I.
class JacobiFrame {
 public:
  explicit JacobiFrame(ClassicalPath path);

  const ClassicalPath& path() const noexcept { return path_; }
  int dimension() const noexcept { return path_.dimension(); }
  double duration() const noexcept { return path_.duration(); }
  const std::vector<double>& grid() const noexcept { return path_.grid(); }

  JacobiFields at(double tau) const;

  /// det of [[phi0, phi1], [dphi0, dphi1]] at tau; constant along the path.
  double det_m(double tau) const;
  double det_m0() const noexcept { return det_m0_; }

  /// (dq(t)/dv0)^{-1}, which equals d^2(-S)/dq0 dq1.
  const Mat& end_inverse() const noexcept { return bt_inv_; }

 private:
  ClassicalPath path_;
  Mat bt_inv_;  // inverse of dq(t)/dv0
  Mat a_end_;   // dq(t)/dq0
  double det_m0_ = 0.0;
};

/// Throws DegenerateJacobian when dq(t)/dv0 is singular.
JacobiFrame jacobi_frame(const ClassicalPath& path, double singular_tol = 1e-8);

struct HessianBlocks {
  /// s01(l, m) = d^2(-S) / dq0^l dq1^m.
  Mat s01;
  Mat s01_inv;
  /// d^2 S / dq0^2.
  Mat s00;
  /// d^2 S / dq1^2.
  Mat s11;
  double cond = 0.0;
};

HessianBlocks mixed_hessian(const JacobiFrame& frame, double max_cond = 1e12);

/// Green's function of the fluctuation operator with Dirichlet ends:
/// D[G](., tau) = -delta, G = 0 on the boundary of [0,t]^2.
class GreenKernel {
 public:
  GreenKernel(JacobiFrame frame, HessianBlocks hessian);

  const JacobiFrame& frame() const noexcept { return frame_; }
  const HessianBlocks& hessian() const noexcept { return hessian_; }
  const ClassicalPath& path() const noexcept { return frame_.path(); }
  const PotentialSpec& spec() const noexcept { return frame_.path().spec(); }
  int dimension() const noexcept { return frame_.dimension(); }
  double duration() const noexcept { return frame_.duration(); }

  /// Branch selector. Upper is s > u, lower is s < u.
  enum class Branch { upper, lower };

  // Branch formulas on precomputed fields at s (first argument) and u.
  Mat g(const JacobiFields& s, const JacobiFields& u, Branch b) const;
  Mat dg_ds(const JacobiFields& s, const JacobiFields& u, Branch b) const;
  Mat dg_du(const JacobiFields& s, const JacobiFields& u, Branch b) const;
  Mat d2g_dsdu(const JacobiFields& s, const JacobiFields& u, Branch b) const;
  /// Coefficient of delta(s - u) in d^2 G / ds du at s = u = tau.
  Mat jump(const JacobiFields& f) const;

  Mat green(double s, double u) const;

  struct Derivatives {
    Mat d1;          // dG/ds; on the diagonal the two branches are averaged
    Mat d11_smooth;  // d^2G/ds du away from the diagonal
    Mat jump;        // coefficient of delta(s - u) in d^2G/ds du
  };
  Derivatives derivatives(double s, double u) const;

  /// Applies the fluctuation operator D to a path given by value, first and
  /// second derivative at the path time of `f`.
  Vec apply_operator(const JacobiFields& f, const Vec& xi, const Vec& dxi, const Vec& ddxi) const;

 private:
  JacobiFrame frame_;
  HessianBlocks hessian_;
  Mat k_;  // s01^{-T}
};

GreenKernel green_kernel(const ClassicalPath& path);

/// A smooth path on [0,t] vanishing at both ends.
struct BasedLoop {
  /// Returns (xi, xi', xi'') at tau.
  std::function<std::array<Vec, 3>(double tau)> eval;
};

/// max over probe times s of | int_0^t G(s,u) D[xi](u) du + xi(s) |.
double greens_defect(const GreenKernel& kernel, const BasedLoop& loop, int probes = 17, int nodes = 48);

struct MorseOptions {
  int grid = 512;
  double tol = 1e-10;
  /// Relative size of the smallest singular value of dq/dv0 below which a
  /// refined minimum is treated as a conjugate point.
  double zero_tol = 1e-6;
};

/// Number of conjugate points in (0,t), counted with multiplicity (nullity of
/// dq(tau)/dv0). Throws DegenerateJacobian if one sits at t.
int morse_index(const ClassicalPath& path, const MorseOptions& opts = {});

}  // namespace semiprop
