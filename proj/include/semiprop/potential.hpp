// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace semiprop {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Multi-index stored as derivative counts per axis, e.g. (2,1) = d^3/dx^2 dy.
using MultiIndex = std::vector<int>;

/// Converts a list of axes (one entry per derivative) into per-axis counts.
MultiIndex multi_index_from_axes(int n, std::span<const int> axes);

struct Monomial {
  double coeff = 0.0;
  std::vector<int> exponents;
};

/// Sparse multivariate polynomial on R^n. Derivatives are exact.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(int n, std::vector<Monomial> terms);

  int dimension() const noexcept { return n_; }
  const std::vector<Monomial>& terms() const noexcept { return terms_; }
  int degree() const noexcept { return degree_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  double eval(const Vec& q) const;
  double partial(const Vec& q, std::span<const int> alpha) const;

  /// True when the alpha-derivative is the zero polynomial.
  bool partial_vanishes(std::span<const int> alpha) const;

 private:
  int n_ = 0;
  int degree_ = 0;
  std::vector<Monomial> terms_;
};

/// Electric potential C and magnetic potential B = (B_1..B_n), both
/// polynomial. Immutable once built.
class PotentialSpec {
 public:
  PotentialSpec(int n, Polynomial c, std::vector<Polynomial> b, int max_order);

  /// Parses {"n": 1, "C": [{"c": 1.0, "e": [4]}], "B": [[...], ...],
  /// "max_order": 8}. Throws ConfigError carrying a JSON pointer.
  static PotentialSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  int dimension() const noexcept { return n_; }
  int max_order() const noexcept { return max_order_; }
  const Polynomial& electric() const noexcept { return c_; }
  const Polynomial& magnetic(int i) const { return b_.at(i); }
  bool has_magnetic() const noexcept;

  double eval_C(const Vec& q) const { return c_.eval(q); }
  double eval_B(int i, const Vec& q) const { return b_[i].eval(q); }

  /// Throws std::out_of_range when |alpha| exceeds max_order.
  double partial_C(const Vec& q, std::span<const int> alpha) const;
  double partial_B(int i, const Vec& q, std::span<const int> alpha) const;

  Vec B(const Vec& q) const;
  Vec grad_C(const Vec& q) const;
  Mat hess_C(const Vec& q) const;
  /// dB(q)(i, j) = dB_i/dq^j.
  Mat jacobian_B(const Vec& q) const;
  /// F(i, j) = dB_i/dq^j - dB_j/dq^i.
  Mat field_strength(const Vec& q) const;
  double div_B(const Vec& q) const;

  /// Acceleration from the Euler-Lagrange equation,
  /// a_i = -(d_j B_i - d_i B_j) v^j - d_i C.
  Vec acceleration(const Vec& q, const Vec& v) const;
  /// d a_i / d q^k; the velocity Jacobian is -field_strength(q).
  Mat acceleration_dq(const Vec& q, const Vec& v) const;
  /// Lagrangian 1/2|v|^2 + B(q).v - C(q).
  double lagrangian(const Vec& q, const Vec& v) const;

 private:
  void check_order(std::span<const int> alpha) const;

  int n_;
  Polynomial c_;
  std::vector<Polynomial> b_;
  int max_order_;
};

/// Highest derivative order of the potentials needed by closed diagrams of
/// loop order up to `loops` (the largest vertex has valence 2*loops).
int required_order(int loops);

}  // namespace semiprop
