// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "semiprop/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "semiprop/errors.hpp"
#include "semiprop/quadrature.hpp"

namespace semiprop {

double vertex_weight(const PotentialSpec& spec, const Vec& q, const Vec& v, std::span<const int> axes, bool marked) {
  const int n = spec.dimension();
  if (marked) {
    const auto alpha = multi_index_from_axes(n, axes.subspan(1));
    return -spec.partial_B(axes[0], q, alpha);
  }
  const auto alpha = multi_index_from_axes(n, axes);
  double w = spec.partial_C(q, alpha);
  for (int k = 0; k < n; ++k) {
    if (spec.magnetic(k).is_zero()) continue;
    w -= spec.partial_B(k, q, alpha) * v[k];
  }
  return w;
}

bool vertex_weight_vanishes(const PotentialSpec& spec, std::span<const int> axes, bool marked) {
  const int n = spec.dimension();
  if (marked) {
    const auto alpha = multi_index_from_axes(n, axes.subspan(1));
    return spec.magnetic(axes[0]).partial_vanishes(alpha);
  }
  const auto alpha = multi_index_from_axes(n, axes);
  if (!spec.electric().partial_vanishes(alpha)) return false;
  for (int k = 0; k < n; ++k)
    if (!spec.magnetic(k).partial_vanishes(alpha)) return false;
  return true;
}

EdgeValue edge_kernel(const GreenKernel& kernel, EdgeMarks marks, int i, int j, double s, double u) {
  switch (marks) {
    case EdgeMarks::none:
      return {kernel.green(s, u)(i, j), std::nullopt};
    case EdgeMarks::first:
      return {kernel.derivatives(s, u).d1(i, j), std::nullopt};
    case EdgeMarks::both: {
      const auto d = kernel.derivatives(s, u);
      return {d.d11_smooth(i, j), d.jump(i, j)};
    }
  }
  return {};
}

namespace {

using Branch = GreenKernel::Branch;

struct EdgeInfo {
  int h0, h1;  // h0 carries the mark when there is exactly one
  int v0, v1;
  EdgeMarks marks;
};

struct Layout {
  int n = 0;
  int nv = 0;
  int nh = 0;
  // Half-edges of each vertex, marked one first.
  std::vector<std::vector<int>> slots;
  std::vector<bool> marked;
  std::vector<EdgeInfo> edges;
  std::vector<int> doubly;  // edges with both ends marked
};

Layout make_layout(const MarkedDiagram& md, int n) {
  Layout L;
  L.n = n;
  L.nv = static_cast<int>(md.base.vertices.size());
  L.nh = md.base.half_edges;
  std::vector<int> vertex_of(L.nh);
  for (int v = 0; v < L.nv; ++v) {
    auto hs = md.base.vertices[v];
    std::stable_partition(hs.begin(), hs.end(), [&](int h) { return md.is_marked(h); });
    L.marked.push_back(md.is_marked(hs.front()));
    for (int h : hs) vertex_of[h] = v;
    L.slots.push_back(std::move(hs));
  }
  for (const auto& e : md.base.edges) {
    EdgeInfo info{e[0], e[1], 0, 0, EdgeMarks::none};
    const bool m0 = md.is_marked(e[0]), m1 = md.is_marked(e[1]);
    if (m1 && !m0) std::swap(info.h0, info.h1);
    info.v0 = vertex_of[info.h0];
    info.v1 = vertex_of[info.h1];
    info.marks = m0 && m1 ? EdgeMarks::both : (m0 || m1 ? EdgeMarks::first : EdgeMarks::none);
    if (info.marks == EdgeMarks::both) L.doubly.push_back(static_cast<int>(L.edges.size()));
    L.edges.push_back(info);
  }
  return L;
}

int ipow(int b, int e) {
  int r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Surviving index labelings, stored as per-vertex codes (base-n digits of
// the vertex's slot axes) followed by the half-edge axes.
struct Labelings {
  std::vector<std::vector<int>> codes;
  std::vector<std::vector<int>> axes;
};

Labelings enumerate_labelings(const Layout& L, const PotentialSpec& spec) {
  Labelings out;
  std::vector<int> axes(L.nh, 0), codes(L.nv, 0);
  auto recurse = [&](auto&& self, int v) -> void {
    if (v == L.nv) {
      out.codes.push_back(codes);
      out.axes.push_back(axes);
      return;
    }
    const auto& hs = L.slots[v];
    const int deg = static_cast<int>(hs.size());
    std::vector<int> local(deg);
    for (int code = 0; code < ipow(L.n, deg); ++code) {
      int c = code;
      for (int k = deg - 1; k >= 0; --k) {
        local[k] = c % L.n;
        c /= L.n;
      }
      if (vertex_weight_vanishes(spec, local, L.marked[v])) continue;
      for (int k = 0; k < deg; ++k) axes[hs[k]] = local[k];
      codes[v] = code;
      self(self, v + 1);
    }
  };
  recurse(recurse, 0);
  return out;
}

// One term of the delta expansion: a subset of doubly marked edges collapsed
// onto the diagonal, leaving one time variable per group of vertices.
class Integrand {
 public:
  Integrand(const GreenKernel& kernel, const Layout& layout, const Labelings& labels, unsigned delta_mask)
      : kernel_(kernel), L_(layout), labels_(labels) {
    group_.assign(L_.nv, -1);
    is_delta_.assign(L_.edges.size(), false);
    for (std::size_t k = 0; k < L_.doubly.size(); ++k)
      if (delta_mask & (1u << k)) is_delta_[L_.doubly[k]] = true;
    std::vector<int> parent(L_.nv);
    std::iota(parent.begin(), parent.end(), 0);
    for (std::size_t e = 0; e < L_.edges.size(); ++e)
      if (is_delta_[e]) parent[std::max(L_.edges[e].v0, L_.edges[e].v1)] = std::min(L_.edges[e].v0, L_.edges[e].v1);
    for (int v = 0; v < L_.nv; ++v)
      if (parent[v] == v) group_[v] = groups_++;
    for (int v = 0; v < L_.nv; ++v) group_[v] = group_[parent[v]];
  }

  int dimension() const noexcept { return groups_; }

  double operator()(const std::vector<double>& times) const {
    const int n = L_.n;
    std::vector<JacobiFields> fields;
    fields.reserve(groups_);
    for (double s : times) fields.push_back(kernel_.frame().at(s));
    const auto& spec = kernel_.spec();

    std::vector<std::vector<double>> weights(L_.nv);
    for (int v = 0; v < L_.nv; ++v) {
      const auto& f = fields[group_[v]];
      const int deg = static_cast<int>(L_.slots[v].size());
      auto& w = weights[v];
      w.assign(ipow(n, deg), 0.0);
      std::vector<int> local(deg);
      for (int code = 0; code < static_cast<int>(w.size()); ++code) {
        int c = code;
        for (int k = deg - 1; k >= 0; --k) {
          local[k] = c % n;
          c /= n;
        }
        if (vertex_weight_vanishes(spec, local, L_.marked[v])) continue;
        w[code] = vertex_weight(spec, f.q, f.v, local, L_.marked[v]);
      }
    }

    std::vector<Mat> kernels;
    kernels.reserve(L_.edges.size());
    for (std::size_t e = 0; e < L_.edges.size(); ++e) {
      const auto& info = L_.edges[e];
      const int g0 = group_[info.v0], g1 = group_[info.v1];
      const auto& fs = fields[g0];
      const auto& fu = fields[g1];
      if (g0 == g1) {
        switch (info.marks) {
          case EdgeMarks::none:
            kernels.push_back(kernel_.g(fs, fu, Branch::upper));
            break;
          case EdgeMarks::first:
            kernels.push_back(0.5 * (kernel_.dg_ds(fs, fu, Branch::upper) + kernel_.dg_ds(fs, fu, Branch::lower)));
            break;
          case EdgeMarks::both:
            kernels.push_back(kernel_.jump(fs));
            break;
        }
        continue;
      }
      const auto b = times[g0] > times[g1] ? Branch::upper : Branch::lower;
      switch (info.marks) {
        case EdgeMarks::none:
          kernels.push_back(kernel_.g(fs, fu, b));
          break;
        case EdgeMarks::first:
          kernels.push_back(kernel_.dg_ds(fs, fu, b));
          break;
        case EdgeMarks::both:
          kernels.push_back(kernel_.d2g_dsdu(fs, fu, b));
          break;
      }
    }

    double sum = 0.0;
    for (std::size_t l = 0; l < labels_.codes.size(); ++l) {
      const auto& codes = labels_.codes[l];
      const auto& axes = labels_.axes[l];
      double term = 1.0;
      for (int v = 0; v < L_.nv && term != 0.0; ++v) term *= weights[v][codes[v]];
      for (std::size_t e = 0; e < L_.edges.size() && term != 0.0; ++e)
        term *= kernels[e](axes[L_.edges[e].h0], axes[L_.edges[e].h1]);
      sum += term;
    }
    return sum;
  }

 private:
  const GreenKernel& kernel_;
  const Layout& L_;
  const Labelings& labels_;
  std::vector<int> group_;
  std::vector<bool> is_delta_;
  int groups_ = 0;
};

std::int64_t factorial(int m) {
  std::int64_t r = 1;
  for (int k = 2; k <= m; ++k) r *= k;
  return r;
}

// Integral over [0,t]^m split into the m! order simplices, each mapped from
// the unit cube by s_top = t x_top, s_below = s_above x_below.
double gauss_simplices(const Integrand& f, double t, int nodes) {
  const int m = f.dimension();
  const auto& rule = gauss_legendre(nodes);
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> idx(m, 0);
  std::vector<double> times(m), ordered(m);
  double total = 0.0;
  do {
    std::fill(idx.begin(), idx.end(), 0);
    double simplex = 0.0;
    while (true) {
      double jac = 1.0, w = 1.0, upper = t;
      for (int k = m - 1; k >= 0; --k) {
        ordered[k] = upper * rule.nodes[idx[k]];
        jac *= upper;
        w *= rule.weights[idx[k]];
        upper = ordered[k];
      }
      for (int k = 0; k < m; ++k) times[perm[k]] = ordered[k];
      simplex += w * jac * f(times);
      int k = 0;
      while (k < m && ++idx[k] == nodes) idx[k++] = 0;
      if (k == m) break;
    }
    total += simplex;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

double qmc_cube(const Integrand& f, double t, std::uint64_t samples, std::uint64_t seed) {
  const int m = f.dimension();
  ShiftedHalton points(m, seed);
  std::vector<double> x(m), times(m);
  double sum = 0.0;
  for (std::uint64_t k = 1; k <= samples; ++k) {
    points.point(k, x);
    for (int d = 0; d < m; ++d) times[d] = t * x[d];
    sum += f(times);
  }
  return std::pow(t, m) * sum / static_cast<double>(samples);
}

}  // namespace

DiagramValue evaluate(const GreenKernel& kernel, const MarkedDiagram& md, const QuadratureOptions& opts) {
  validate(md);
  const auto& spec = kernel.spec();
  int max_valence = 0;
  for (const auto& v : md.base.vertices) max_valence = std::max(max_valence, static_cast<int>(v.size()));
  if (max_valence > spec.max_order())
    throw ConfigError("/max_order", "diagram needs derivatives of order " + std::to_string(max_valence) +
                                        " but max_order is " + std::to_string(spec.max_order()));

  const Layout layout = make_layout(md, spec.dimension());
  const Labelings labels = enumerate_labelings(layout, spec);
  DiagramValue out;
  out.n_labelings = static_cast<std::int64_t>(labels.codes.size());
  const double t = kernel.duration();
  const unsigned subsets = 1u << layout.doubly.size();
  bool used_qmc = false;
  for (unsigned mask = 0; mask < subsets; ++mask) {
    const Integrand f(kernel, layout, labels, mask);
    const int m = f.dimension();
    out.n_simplices += factorial(m);
    if (labels.codes.empty()) continue;
    if (m <= opts.max_gauss_dim) {
      const double coarse = gauss_simplices(f, t, opts.nodes);
      const double fine = gauss_simplices(f, t, opts.nodes + opts.refine);
      out.value += fine;
      out.est_error += std::abs(fine - coarse);
    } else {
      used_qmc = true;
      const double a = qmc_cube(f, t, opts.qmc_samples, opts.seed);
      const double b = qmc_cube(f, t, opts.qmc_samples, opts.seed + 0x9e3779b97f4a7c15ULL);
      out.value += 0.5 * (a + b);
      out.est_error += std::abs(a - b);
    }
  }
  const double tol = (used_qmc ? opts.qmc_tol : opts.tol) * std::max(1.0, std::abs(out.value));
  if (out.est_error > tol)
    throw QuadratureNotConverged(out.value, out.est_error,
                                 "diagram " + canonical_key(md) + ": quadrature estimate " +
                                     std::to_string(out.value) + " has error " + std::to_string(out.est_error));
  return out;
}

}  // namespace semiprop
