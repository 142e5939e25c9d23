// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "semiprop/potential.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "semiprop/errors.hpp"

namespace semiprop {

MultiIndex multi_index_from_axes(int n, std::span<const int> axes) {
  MultiIndex alpha(n, 0);
  for (int a : axes) {
    if (a < 0 || a >= n) throw std::out_of_range("axis out of range");
    ++alpha[a];
  }
  return alpha;
}

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// e! / (e - a)!
double falling_factorial(int e, int a) {
  double r = 1.0;
  for (int i = 0; i < a; ++i) r *= static_cast<double>(e - i);
  return r;
}

}  // namespace

Polynomial::Polynomial(int n, std::vector<Monomial> terms) : n_(n) {
  for (auto& t : terms) {
    if (static_cast<int>(t.exponents.size()) != n)
      throw std::invalid_argument("monomial exponent vector length differs from dimension");
    for (int e : t.exponents)
      if (e < 0) throw std::invalid_argument("negative exponent");
    if (t.coeff == 0.0) continue;
    // Merge like terms so the zero pattern is exact.
    auto it = std::find_if(terms_.begin(), terms_.end(),
                           [&](const Monomial& m) { return m.exponents == t.exponents; });
    if (it != terms_.end()) {
      it->coeff += t.coeff;
    } else {
      terms_.push_back(std::move(t));
    }
  }
  std::erase_if(terms_, [](const Monomial& m) { return m.coeff == 0.0; });
  for (const auto& t : terms_)
    degree_ = std::max(degree_, std::accumulate(t.exponents.begin(), t.exponents.end(), 0));
}

double Polynomial::eval(const Vec& q) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    double m = t.coeff;
    for (int i = 0; i < n_; ++i) m *= ipow(q[i], t.exponents[i]);
    sum += m;
  }
  return sum;
}

double Polynomial::partial(const Vec& q, std::span<const int> alpha) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    double m = t.coeff;
    for (int i = 0; i < n_ && m != 0.0; ++i) {
      const int e = t.exponents[i];
      const int a = alpha[i];
      if (a > e) {
        m = 0.0;
      } else {
        m *= falling_factorial(e, a) * ipow(q[i], e - a);
      }
    }
    sum += m;
  }
  return sum;
}

bool Polynomial::partial_vanishes(std::span<const int> alpha) const {
  for (const auto& t : terms_) {
    bool survives = true;
    for (int i = 0; i < n_; ++i)
      if (alpha[i] > t.exponents[i]) {
        survives = false;
        break;
      }
    if (survives) return false;
  }
  return true;
}

PotentialSpec::PotentialSpec(int n, Polynomial c, std::vector<Polynomial> b, int max_order)
    : n_(n), c_(std::move(c)), b_(std::move(b)), max_order_(max_order) {
  if (n <= 0) throw std::invalid_argument("dimension must be positive");
  if (max_order < 0) throw std::invalid_argument("max_order must be non-negative");
  if (c_.dimension() == 0) c_ = Polynomial(n, {});
  if (c_.dimension() != n) throw std::invalid_argument("C has wrong dimension");
  if (b_.empty()) b_.assign(n, Polynomial(n, {}));
  if (static_cast<int>(b_.size()) != n) throw std::invalid_argument("B must have n components");
  for (auto& bi : b_) {
    if (bi.dimension() == 0) bi = Polynomial(n, {});
    if (bi.dimension() != n) throw std::invalid_argument("B component has wrong dimension");
  }
}

namespace {

Polynomial parse_terms(const nlohmann::json& arr, int n, const std::string& path) {
  if (!arr.is_array()) throw ConfigError(path, "expected an array of terms");
  std::vector<Monomial> terms;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const auto& term = arr[k];
    const std::string tp = path + "/" + std::to_string(k);
    if (!term.is_object()) throw ConfigError(tp, "expected a term object {\"c\": ..., \"e\": [...]}");
    if (!term.contains("c") || !term["c"].is_number())
      throw ConfigError(tp + "/c", "missing or non-numeric coefficient");
    if (!term.contains("e") || !term["e"].is_array())
      throw ConfigError(tp + "/e", "missing exponent array");
    const auto& e = term["e"];
    if (static_cast<int>(e.size()) != n)
      throw ConfigError(tp + "/e", "expected " + std::to_string(n) + " exponents, got " +
                                       std::to_string(e.size()));
    Monomial m;
    m.coeff = term["c"].get<double>();
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (!e[i].is_number_integer() || e[i].get<long>() < 0)
        throw ConfigError(tp + "/e/" + std::to_string(i), "exponent must be a non-negative integer");
      m.exponents.push_back(e[i].get<int>());
    }
    terms.push_back(std::move(m));
  }
  return Polynomial(n, std::move(terms));
}

nlohmann::json terms_to_json(const Polynomial& p) {
  auto arr = nlohmann::json::array();
  for (const auto& t : p.terms()) arr.push_back({{"c", t.coeff}, {"e", t.exponents}});
  return arr;
}

}  // namespace

PotentialSpec PotentialSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("", "system description must be a JSON object");
  if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<int>() <= 0)
    throw ConfigError("/n", "dimension must be a positive integer");
  const int n = j["n"].get<int>();
  Polynomial c(n, {});
  if (j.contains("C")) c = parse_terms(j["C"], n, "/C");
  std::vector<Polynomial> b(n, Polynomial(n, {}));
  if (j.contains("B") && !j["B"].is_null()) {
    const auto& bj = j["B"];
    if (!bj.is_array()) throw ConfigError("/B", "expected an array of n term lists");
    // "B": [[]] is accepted as "zero field" regardless of n.
    const bool all_empty =
        std::all_of(bj.begin(), bj.end(), [](const auto& x) { return x.is_array() && x.empty(); });
    if (!(all_empty && !bj.empty()) && static_cast<int>(bj.size()) != n)
      throw ConfigError("/B", "expected " + std::to_string(n) + " components, got " +
                                  std::to_string(bj.size()));
    if (!all_empty)
      for (int i = 0; i < n; ++i) b[i] = parse_terms(bj[i], n, "/B/" + std::to_string(i));
  }
  int max_order = 8;
  if (j.contains("max_order")) {
    if (!j["max_order"].is_number_integer() || j["max_order"].get<int>() < 0)
      throw ConfigError("/max_order", "must be a non-negative integer");
    max_order = j["max_order"].get<int>();
  }
  return PotentialSpec(n, std::move(c), std::move(b), max_order);
}

nlohmann::json PotentialSpec::to_json() const {
  nlohmann::json j;
  j["n"] = n_;
  j["C"] = terms_to_json(c_);
  auto b = nlohmann::json::array();
  for (const auto& bi : b_) b.push_back(terms_to_json(bi));
  j["B"] = b;
  j["max_order"] = max_order_;
  return j;
}

bool PotentialSpec::has_magnetic() const noexcept {
  return std::any_of(b_.begin(), b_.end(), [](const Polynomial& p) { return !p.is_zero(); });
}

void PotentialSpec::check_order(std::span<const int> alpha) const {
  if (static_cast<int>(alpha.size()) != n_) throw std::invalid_argument("multi-index length differs from n");
  const int order = std::accumulate(alpha.begin(), alpha.end(), 0);
  if (order > max_order_)
    throw std::out_of_range("derivative order " + std::to_string(order) + " exceeds max_order " +
                            std::to_string(max_order_));
}

double PotentialSpec::partial_C(const Vec& q, std::span<const int> alpha) const {
  check_order(alpha);
  return c_.partial(q, alpha);
}

double PotentialSpec::partial_B(int i, const Vec& q, std::span<const int> alpha) const {
  check_order(alpha);
  return b_.at(i).partial(q, alpha);
}

Vec PotentialSpec::B(const Vec& q) const {
  Vec out(n_);
  for (int i = 0; i < n_; ++i) out[i] = b_[i].eval(q);
  return out;
}

Vec PotentialSpec::grad_C(const Vec& q) const {
  Vec g(n_);
  MultiIndex a(n_, 0);
  for (int i = 0; i < n_; ++i) {
    a[i] = 1;
    g[i] = c_.partial(q, a);
    a[i] = 0;
  }
  return g;
}

Mat PotentialSpec::hess_C(const Vec& q) const {
  Mat h(n_, n_);
  MultiIndex a(n_, 0);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j <= i; ++j) {
      ++a[i];
      ++a[j];
      h(i, j) = h(j, i) = c_.partial(q, a);
      --a[i];
      --a[j];
    }
  return h;
}

Mat PotentialSpec::jacobian_B(const Vec& q) const {
  Mat d(n_, n_);
  MultiIndex a(n_, 0);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      a[j] = 1;
      d(i, j) = b_[i].partial(q, a);
      a[j] = 0;
    }
  return d;
}

Mat PotentialSpec::field_strength(const Vec& q) const {
  const Mat d = jacobian_B(q);
  return d - d.transpose();
}

double PotentialSpec::div_B(const Vec& q) const { return jacobian_B(q).trace(); }

Vec PotentialSpec::acceleration(const Vec& q, const Vec& v) const {
  return -field_strength(q) * v - grad_C(q);
}

Mat PotentialSpec::acceleration_dq(const Vec& q, const Vec& v) const {
  // da_i/dq^k = -(d_k d_j B_i - d_k d_i B_j) v^j - d_k d_i C
  Mat out = -hess_C(q);
  if (!has_magnetic()) return out;
  MultiIndex alpha(n_, 0);
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < n_; ++k) {
      double s = 0.0;
      ++alpha[k];
      for (int j = 0; j < n_; ++j) {
        ++alpha[j];
        const double dkj_bi = b_[i].partial(q, alpha);
        --alpha[j];
        ++alpha[i];
        const double dki_bj = b_[j].partial(q, alpha);
        --alpha[i];
        s += (dkj_bi - dki_bj) * v[j];
      }
      --alpha[k];
      out(i, k) -= s;
    }
  return out;
}

double PotentialSpec::lagrangian(const Vec& q, const Vec& v) const {
  return 0.5 * v.squaredNorm() + B(q).dot(v) - eval_C(q);
}

int required_order(int loops) {
  if (loops < 0) throw std::invalid_argument("loop order must be non-negative");
  return loops == 0 ? 1 : 2 * loops;
}

}  // namespace semiprop
