// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "semiprop/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "semiprop/errors.hpp"
#include "semiprop/quadrature.hpp"

namespace semiprop {

JacobiFrame::JacobiFrame(ClassicalPath path) : path_(std::move(path)) {
  const auto end = path_.end();
  bt_inv_ = end.dq_dv0().inverse();
  a_end_ = end.dq_dq0();
  det_m0_ = det_m(0.0);
}

JacobiFields JacobiFrame::at(double tau) const {
  const auto s = path_.at(tau);
  JacobiFields f;
  f.tau = s.tau;
  f.q = s.q;
  f.v = s.v;
  const Mat a = s.dq_dq0();
  const Mat b = s.dq_dv0();
  const Mat da = s.dv_dq0();
  const Mat db = s.dv_dv0();
  f.phi1 = b * bt_inv_;
  f.dphi1 = db * bt_inv_;
  f.phi0 = a - f.phi1 * a_end_;
  f.dphi0 = da - f.dphi1 * a_end_;
  if (tau >= path_.duration()) {
    const auto n = f.phi0.rows();
    f.phi0.setZero();
    f.phi1 = Mat::Identity(n, n);
  }
  return f;
}

double JacobiFrame::det_m(double tau) const {
  const auto f = at(tau);
  const auto n = f.phi0.rows();
  Mat m(2 * n, 2 * n);
  m << f.phi0, f.phi1, f.dphi0, f.dphi1;
  return m.determinant();
}

JacobiFrame jacobi_frame(const ClassicalPath& path, double singular_tol) {
  const Mat b = path.end().dq_dv0();
  Eigen::JacobiSVD<Mat> svd(b);
  const auto& s = svd.singularValues();
  if (s.minCoeff() < singular_tol * std::max(s.maxCoeff(), path.duration()))
    throw DegenerateJacobian("dq(t)/dv0 is singular: the path is degenerate");
  return JacobiFrame(path);
}

HessianBlocks mixed_hessian(const JacobiFrame& frame, double max_cond) {
  const auto& path = frame.path();
  const auto& spec = path.spec();
  const auto end = path.end();
  HessianBlocks h;
  h.s01 = frame.end_inverse();
  h.s01_inv = end.dq_dv0();
  Eigen::JacobiSVD<Mat> svd(h.s01);
  const auto& sv = svd.singularValues();
  h.cond = sv.maxCoeff() / sv.minCoeff();
  if (!(h.cond < max_cond)) throw DegenerateJacobian("mixed action Hessian is singular");
  // d(-S)/dq0 = v0 + B(q0) and dS/dq1 = v(t) + B(q1).
  h.s00 = h.s01 * end.dq_dq0() - spec.jacobian_B(path.q0());
  h.s11 = end.dv_dv0() * h.s01 + spec.jacobian_B(path.q_end());
  return h;
}

GreenKernel::GreenKernel(JacobiFrame frame, HessianBlocks hessian)
    : frame_(std::move(frame)), hessian_(std::move(hessian)), k_(hessian_.s01_inv.transpose()) {}

// Upper branch (s > u): phi0(s) K phi1(u)^T.  Lower (s < u): phi1(s) K^T phi0(u)^T.
Mat GreenKernel::g(const JacobiFields& s, const JacobiFields& u, Branch b) const {
  return b == Branch::upper ? Mat(s.phi0 * k_ * u.phi1.transpose())
                            : Mat(s.phi1 * k_.transpose() * u.phi0.transpose());
}

Mat GreenKernel::dg_ds(const JacobiFields& s, const JacobiFields& u, Branch b) const {
  return b == Branch::upper ? Mat(s.dphi0 * k_ * u.phi1.transpose())
                            : Mat(s.dphi1 * k_.transpose() * u.phi0.transpose());
}

Mat GreenKernel::dg_du(const JacobiFields& s, const JacobiFields& u, Branch b) const {
  return b == Branch::upper ? Mat(s.phi0 * k_ * u.dphi1.transpose())
                            : Mat(s.phi1 * k_.transpose() * u.dphi0.transpose());
}

Mat GreenKernel::d2g_dsdu(const JacobiFields& s, const JacobiFields& u, Branch b) const {
  return b == Branch::upper ? Mat(s.dphi0 * k_ * u.dphi1.transpose())
                            : Mat(s.dphi1 * k_.transpose() * u.dphi0.transpose());
}

Mat GreenKernel::jump(const JacobiFields& f) const {
  // Discontinuity of dG/du across s = u, read in the direction of increasing s.
  return dg_du(f, f, Branch::upper) - dg_du(f, f, Branch::lower);
}

Mat GreenKernel::green(double s, double u) const {
  const auto fs = frame_.at(s);
  const auto fu = frame_.at(u);
  return g(fs, fu, s >= u ? Branch::upper : Branch::lower);
}

GreenKernel::Derivatives GreenKernel::derivatives(double s, double u) const {
  const auto fs = frame_.at(s);
  const auto fu = frame_.at(u);
  Derivatives d;
  if (s == u) {
    d.d1 = 0.5 * (dg_ds(fs, fu, Branch::upper) + dg_ds(fs, fu, Branch::lower));
    d.d11_smooth = 0.5 * (d2g_dsdu(fs, fu, Branch::upper) + d2g_dsdu(fs, fu, Branch::lower));
  } else {
    const auto b = s > u ? Branch::upper : Branch::lower;
    d.d1 = dg_ds(fs, fu, b);
    d.d11_smooth = d2g_dsdu(fs, fu, b);
  }
  d.jump = jump(fu);
  return d;
}

Vec GreenKernel::apply_operator(const JacobiFields& f, const Vec& xi, const Vec& dxi, const Vec& ddxi) const {
  const auto& spec = this->spec();
  return ddxi + spec.field_strength(f.q) * dxi - spec.acceleration_dq(f.q, f.v) * xi;
}

GreenKernel green_kernel(const ClassicalPath& path) {
  JacobiFrame frame = jacobi_frame(path);
  HessianBlocks h = mixed_hessian(frame);
  return GreenKernel(std::move(frame), std::move(h));
}

double greens_defect(const GreenKernel& kernel, const BasedLoop& loop, int probes, int nodes) {
  const double t = kernel.duration();
  const auto& rule = gauss_legendre(nodes);
  double defect = 0.0;
  for (int p = 1; p <= probes; ++p) {
    const double s = t * p / (probes + 1);
    const auto fs = kernel.frame().at(s);
    Vec acc = Vec::Zero(kernel.dimension());
    // G has a kink on the diagonal; integrate each side separately.
    for (const auto& [lo, hi] : {std::pair{0.0, s}, std::pair{s, t}}) {
      for (int k = 0; k < nodes; ++k) {
        const double u = lo + (hi - lo) * rule.nodes[k];
        const auto fu = kernel.frame().at(u);
        const auto xi = loop.eval(u);
        const Vec d = kernel.apply_operator(fu, xi[0], xi[1], xi[2]);
        const auto b = s > u ? GreenKernel::Branch::upper : GreenKernel::Branch::lower;
        acc += (hi - lo) * rule.weights[k] * (kernel.g(fs, fu, b) * d);
      }
    }
    defect = std::max(defect, (acc + loop.eval(s)[0]).cwiseAbs().maxCoeff());
  }
  return defect;
}

namespace {

double normalized_sigma_min(const ClassicalPath& path, double tau) {
  const Mat b = path.at(tau).dq_dv0();
  Eigen::JacobiSVD<Mat> svd(b);
  return svd.singularValues().minCoeff() / tau;
}

int nullity(const ClassicalPath& path, double tau, double tol) {
  const Mat b = path.at(tau).dq_dv0();
  Eigen::JacobiSVD<Mat> svd(b);
  const auto& s = svd.singularValues();
  int k = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] / tau < tol) ++k;
  return std::max(k, 1);
}

}  // namespace

int morse_index(const ClassicalPath& path, const MorseOptions& opts) {
  const double t = path.duration();
  const int m = opts.grid;
  std::vector<double> taus(m + 1), g(m + 1), det(m + 1);
  for (int k = 1; k <= m; ++k) {
    taus[k] = t * k / m;
    const Mat b = path.at(taus[k]).dq_dv0();
    Eigen::JacobiSVD<Mat> svd(b);
    g[k] = svd.singularValues().minCoeff() / taus[k];
    det[k] = b.determinant();
  }
  taus[0] = 0.0;
  g[0] = 1.0;  // dq/dv0 ~ tau I near 0
  det[0] = 1.0;
  const double scale = *std::max_element(g.begin() + 1, g.end());
  const double threshold = opts.zero_tol * scale;

  std::vector<double> zeros;
  auto record = [&](double tau) {
    for (double z : zeros)
      if (std::abs(z - tau) < 1e-6 * t) return;
    zeros.push_back(tau);
  };

  // Simple zeros: sign changes of the determinant, isolated by bisection.
  for (int k = 1; k < m; ++k) {
    if ((det[k] > 0) != (det[k + 1] > 0)) {
      double lo = taus[k], hi = taus[k + 1];
      double dlo = det[k];
      while (hi - lo > opts.tol * t) {
        const double mid = 0.5 * (lo + hi);
        const double dm = path.at(mid).dq_dv0().determinant();
        if ((dm > 0) == (dlo > 0)) {
          lo = mid;
          dlo = dm;
        } else {
          hi = mid;
        }
      }
      record(0.5 * (lo + hi));
    }
  }
  // Zeros without a sign change show up as near-vanishing minima of sigma_min.
  for (int k = 1; k < m; ++k) {
    if (!(g[k] <= g[k - 1] && g[k] <= g[k + 1])) continue;
    double a = taus[k - 1] > 0 ? taus[k - 1] : 0.5 * taus[k];
    double b = taus[k + 1];
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - ratio * (b - a), x2 = a + ratio * (b - a);
    double f1 = normalized_sigma_min(path, x1), f2 = normalized_sigma_min(path, x2);
    while (b - a > opts.tol * t) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - ratio * (b - a);
        f1 = normalized_sigma_min(path, x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + ratio * (b - a);
        f2 = normalized_sigma_min(path, x2);
      }
    }
    const double tau = 0.5 * (a + b);
    if (normalized_sigma_min(path, tau) < threshold) record(tau);
  }

  if (g[m] < threshold) throw DegenerateJacobian("conjugate point at the endpoint");
  int index = 0;
  for (double z : zeros) {
    if (z > t * (1.0 - 1e-6)) throw DegenerateJacobian("conjugate point too close to the endpoint");
    index += nullity(path, z, std::max(threshold, 1e-7 * scale));
  }
  return index;
}

}  // namespace semiprop
