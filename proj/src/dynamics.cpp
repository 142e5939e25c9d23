// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "semiprop/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "semiprop/errors.hpp"

namespace semiprop {

namespace odeint = boost::numeric::odeint;
using State = std::vector<double>;

Mat PathSample::dq_dq0() const {
  const auto n = q.size();
  return variational.topLeftCorner(n, n);
}
Mat PathSample::dq_dv0() const {
  const auto n = q.size();
  return variational.topRightCorner(n, n);
}
Mat PathSample::dv_dq0() const {
  const auto n = q.size();
  return variational.bottomLeftCorner(n, n);
}
Mat PathSample::dv_dv0() const {
  const auto n = q.size();
  return variational.bottomRightCorner(n, n);
}

namespace {

// Layout: q (n), v (n), variational frame (2n x 2n, column-major), action.
std::size_t state_size(int n) { return 2 * n + 4 * n * n + 1; }

class EulerLagrangeSystem {
 public:
  explicit EulerLagrangeSystem(const PotentialSpec& spec) : spec_(spec), n_(spec.dimension()) {}

  void operator()(const State& x, State& dxdt, double /*tau*/) const {
    const int n = n_;
    Eigen::Map<const Vec> q(x.data(), n);
    Eigen::Map<const Vec> v(x.data() + n, n);
    Eigen::Map<const Mat> phi(x.data() + 2 * n, 2 * n, 2 * n);

    const Vec qv = q;
    const Vec vv = v;
    const Mat f = spec_.field_strength(qv);
    const Vec a = -f * vv - spec_.grad_C(qv);

    const Mat da_dq = spec_.acceleration_dq(qv, vv);
    Mat jac = Mat::Zero(2 * n, 2 * n);
    jac.topRightCorner(n, n).setIdentity();
    jac.bottomLeftCorner(n, n) = da_dq;
    jac.bottomRightCorner(n, n) = -f;

    dxdt.resize(x.size());
    for (int i = 0; i < n; ++i) {
      dxdt[i] = vv[i];
      dxdt[n + i] = a[i];
    }
    Eigen::Map<Mat> dphi(dxdt.data() + 2 * n, 2 * n, 2 * n);
    dphi.noalias() = jac * phi;
    dxdt.back() = spec_.lagrangian(qv, vv);
  }

 private:
  const PotentialSpec& spec_;
  int n_;
};

using Stepper = odeint::runge_kutta_fehlberg78<State>;

bool finite(const State& x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

ClassicalPath::ClassicalPath(std::shared_ptr<const PotentialSpec> spec, double duration,
                             std::vector<double> grid, std::vector<std::vector<double>> states)
    : spec_(std::move(spec)), duration_(duration), grid_(std::move(grid)), states_(std::move(states)) {}

PathSample ClassicalPath::unpack(double tau, const std::vector<double>& x) const {
  const int n = dimension();
  PathSample s;
  s.tau = tau;
  s.q = Eigen::Map<const Vec>(x.data(), n);
  s.v = Eigen::Map<const Vec>(x.data() + n, n);
  s.variational = Eigen::Map<const Mat>(x.data() + 2 * n, 2 * n, 2 * n);
  s.action = x.back();
  return s;
}

Vec ClassicalPath::q0() const { return unpack(0.0, states_.front()).q; }
Vec ClassicalPath::v0() const { return unpack(0.0, states_.front()).v; }
Vec ClassicalPath::q_end() const { return unpack(duration_, states_.back()).q; }
Vec ClassicalPath::v_end() const { return unpack(duration_, states_.back()).v; }

PathSample ClassicalPath::at(double tau) const {
  if (!(tau >= -1e-12 * duration_ && tau <= duration_ * (1.0 + 1e-12)))
    throw std::out_of_range("path sample time outside [0, t]");
  tau = std::clamp(tau, 0.0, duration_);
  auto it = std::upper_bound(grid_.begin(), grid_.end(), tau);
  const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - grid_.begin()) - 1));
  const double dt = tau - grid_[k];
  if (dt == 0.0) return unpack(tau, states_[k]);
  State x = states_[k];
  Stepper stepper;
  EulerLagrangeSystem sys(*spec_);
  stepper.do_step(sys, x, grid_[k], dt);
  return unpack(tau, x);
}

double ClassicalPath::eom_residual(double tau, double h) const {
  const auto lo = at(std::max(0.0, tau - h));
  const auto hi = at(std::min(duration_, tau + h));
  const auto mid = at(tau);
  const Vec accel = (hi.v - lo.v) / (hi.tau - lo.tau);
  return (accel - spec_->acceleration(mid.q, mid.v)).cwiseAbs().maxCoeff();
}

ClassicalPath flow(const PotentialSpec& spec, const PhaseState& s0, double t, const IntegratorOptions& opts) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("flow duration must be positive");
  const int n = spec.dimension();
  if (s0.q.size() != n || s0.v.size() != n) throw std::invalid_argument("phase state has wrong dimension");
  auto shared = std::make_shared<const PotentialSpec>(spec);
  EulerLagrangeSystem sys(*shared);

  State x(state_size(n), 0.0);
  for (int i = 0; i < n; ++i) {
    x[i] = s0.q[i];
    x[n + i] = s0.v[i];
  }
  Eigen::Map<Mat>(x.data() + 2 * n, 2 * n, 2 * n).setIdentity();
  if (!finite(x)) throw std::invalid_argument("non-finite initial state");

  std::vector<double> grid{0.0};
  std::vector<State> states{x};

  if (opts.fixed_steps > 0) {
    Stepper stepper;
    const double h = t / opts.fixed_steps;
    for (int k = 0; k < opts.fixed_steps; ++k) {
      const double tau = k * h;
      stepper.do_step(sys, x, tau, h);
      if (!finite(x)) throw StepSizeUnderflow(tau, "trajectory diverged near tau = " + std::to_string(tau));
      grid.push_back(k + 1 == opts.fixed_steps ? t : (k + 1) * h);
      states.push_back(x);
    }
    return ClassicalPath(shared, t, std::move(grid), std::move(states));
  }

  auto controlled = odeint::make_controlled(opts.abs_tol, opts.rel_tol, Stepper());
  double tau = 0.0;
  double dt = std::min(t, 0.01 * t + 1e-3);
  const double dt_min = 1e-13 * std::max(1.0, t);
  while (tau < t) {
    if (tau + dt > t) dt = t - tau;
    const double before = tau;
    State trial = x;
    const auto result = controlled.try_step(sys, trial, tau, dt);
    if (result == odeint::success && finite(trial)) {
      x = std::move(trial);
      // Snap the last node to t exactly.
      if (t - tau < 1e-14 * t) tau = t;
      grid.push_back(tau);
      states.push_back(x);
    } else {
      if (result == odeint::success) {
        // Non-finite state on an accepted step: undo and shrink.
        tau = before;
        dt *= 0.25;
      }
      if (dt < dt_min)
        throw StepSizeUnderflow(tau, "step size underflow at tau = " + std::to_string(tau) +
                                         " (possible blow-up)");
    }
  }
  return ClassicalPath(shared, t, std::move(grid), std::move(states));
}

namespace {

double smallest_singular_ratio(const Mat& j, double scale) {
  Eigen::JacobiSVD<Mat> svd(j);
  const auto& s = svd.singularValues();
  return s.minCoeff() / std::max(s.maxCoeff(), scale);
}

}  // namespace

ClassicalPath shoot(const PotentialSpec& spec, double t, const Vec& q0, const Vec& q1,
                    const std::optional<Vec>& v_guess, const ShootOptions& opts) {
  const int n = spec.dimension();
  if (q0.size() != n || q1.size() != n) throw std::invalid_argument("endpoint has wrong dimension");
  if (!(t > 0.0)) throw std::invalid_argument("duration must be positive");
  Vec v = v_guess ? *v_guess : Vec((q1 - q0) / t);
  if (v.size() != n || !v.allFinite()) throw std::invalid_argument("invalid initial velocity guess");

  ClassicalPath path = flow(spec, {q0, v}, t, opts.integrator);
  Vec r = path.q_end() - q1;
  double err = r.cwiseAbs().maxCoeff();
  const double tol = opts.bvp_tol * std::max(1.0, q1.cwiseAbs().maxCoeff());
  int iterations = 0;
  int polish = 0;
  while (true) {
    if (err < tol) {
      if (polish >= opts.polish_steps || err == 0.0) break;
      ++polish;
    } else if (iterations >= opts.max_iterations) {
      throw NonConvergence("shooting did not converge after " + std::to_string(iterations) +
                           " iterations (terminal error " + std::to_string(err) + ")");
    }
    const Mat jac = path.end().dq_dv0();
    if (smallest_singular_ratio(jac, t) < opts.singular_tol)
      throw DegenerateJacobian("dq(t)/dv0 is singular: endpoints are conjugate along the path");
    const Vec step = jac.fullPivLu().solve(r);
    double damping = 1.0;
    bool improved = false;
    for (int halvings = 0; halvings < 30; ++halvings) {
      const Vec trial_v = v - damping * step;
      try {
        ClassicalPath trial = flow(spec, {q0, trial_v}, t, opts.integrator);
        const Vec trial_r = trial.q_end() - q1;
        const double trial_err = trial_r.cwiseAbs().maxCoeff();
        if (trial_err < err || (err < tol && trial_err <= err)) {
          v = trial_v;
          path = std::move(trial);
          r = trial_r;
          err = trial_err;
          improved = true;
          break;
        }
      } catch (const StepSizeUnderflow&) {
      }
      damping *= 0.5;
    }
    ++iterations;
    if (!improved) {
      if (err < tol) break;  // polishing stalled at round-off
      throw NonConvergence("shooting line search failed (terminal error " + std::to_string(err) + ")");
    }
  }
  path.iterations = iterations;
  path.terminal_error = err;
  return path;
}

double action(const ClassicalPath& path) { return path.end().action; }

std::pair<Vec, Vec> boundary_momentum_residual(const ClassicalPath& path, double h, const ShootOptions& opts) {
  const int n = path.dimension();
  const auto& spec = path.spec();
  const double t = path.duration();
  const Vec q0 = path.q0();
  const Vec q1 = path.q_end();
  const Vec v0 = path.v0();
  Vec dS_dq0(n), dS_dq1(n);
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e[i] = h;
    const double sp0 = action(shoot(spec, t, q0 + e, q1, v0, opts));
    const double sm0 = action(shoot(spec, t, q0 - e, q1, v0, opts));
    dS_dq0[i] = (sp0 - sm0) / (2 * h);
    const double sp1 = action(shoot(spec, t, q0, q1 + e, v0, opts));
    const double sm1 = action(shoot(spec, t, q0, q1 - e, v0, opts));
    dS_dq1[i] = (sp1 - sm1) / (2 * h);
  }
  const Vec res0 = -dS_dq0 - (v0 + spec.B(q0));
  const Vec res1 = dS_dq1 - (path.v_end() + spec.B(q1));
  return {res0, res1};
}

std::pair<Vec, ClassicalPath> stationary_source_point(const PotentialSpec& spec, double t, const Vec& q1,
                                                      const ShootOptions& opts) {
  const int n = spec.dimension();
  if (q1.size() != n) throw std::invalid_argument("endpoint has wrong dimension");
  Vec q = q1 + t * spec.B(q1);
  auto launch = [&](const Vec& start) { return flow(spec, {start, -spec.B(start)}, t, opts.integrator); };
  ClassicalPath path = launch(q);
  Vec r = path.q_end() - q1;
  double err = r.cwiseAbs().maxCoeff();
  const double tol = opts.bvp_tol * std::max(1.0, q1.cwiseAbs().maxCoeff());
  int iterations = 0;
  int polish = 0;
  while (true) {
    if (err < tol) {
      if (polish >= opts.polish_steps || err == 0.0) break;
      ++polish;
    } else if (iterations >= opts.max_iterations) {
      throw NonConvergence("stationary source point search did not converge");
    }
    const auto end = path.end();
    const Mat jac = end.dq_dq0() - end.dq_dv0() * spec.jacobian_B(q);
    const Vec step = jac.fullPivLu().solve(r);
    double damping = 1.0;
    bool improved = false;
    for (int halvings = 0; halvings < 30; ++halvings) {
      const Vec trial_q = q - damping * step;
      ClassicalPath trial = launch(trial_q);
      const Vec trial_r = trial.q_end() - q1;
      const double trial_err = trial_r.cwiseAbs().maxCoeff();
      if (trial_err < err || (err < tol && trial_err <= err)) {
        q = trial_q;
        path = std::move(trial);
        r = trial_r;
        err = trial_err;
        improved = true;
        break;
      }
      damping *= 0.5;
    }
    ++iterations;
    if (!improved) {
      if (err < tol) break;
      throw NonConvergence("stationary source point line search failed");
    }
  }
  path.iterations = iterations;
  path.terminal_error = err;
  return {q, std::move(path)};
}

}  // namespace semiprop
