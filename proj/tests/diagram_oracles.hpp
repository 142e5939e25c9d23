// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force diagram oracles that share no code with the library's
// canonicalization.

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "semiprop/diagrams.hpp"

namespace semiprop::testing {

// Oracle: brute force over all bijections of the half-edges.
using Blocks = std::set<std::set<int>>;

inline Blocks edge_blocks(const Diagram& d, const std::vector<int>& p) {
  Blocks out;
  for (const auto& e : d.edges) out.insert({p[e[0]], p[e[1]]});
  return out;
}

inline Blocks vertex_blocks(const Diagram& d, const std::vector<int>& p) {
  Blocks out;
  for (const auto& v : d.vertices) {
    std::set<int> b;
    for (int h : v) b.insert(p[h]);
    out.insert(b);
  }
  return out;
}

inline std::set<int> mapped(const std::vector<int>& m, const std::vector<int>& p) {
  std::set<int> out;
  for (int h : m) out.insert(p[h]);
  return out;
}

inline bool brute_isomorphic(const MarkedDiagram& a, const MarkedDiagram& b) {
  if (a.base.half_edges != b.base.half_edges) return false;
  std::vector<int> id(a.base.half_edges);
  std::iota(id.begin(), id.end(), 0);
  const auto eb = edge_blocks(b.base, id);
  const auto vb = vertex_blocks(b.base, id);
  const std::set<int> mb(b.marks.begin(), b.marks.end());
  std::vector<int> p = id;
  do {
    if (edge_blocks(a.base, p) == eb && vertex_blocks(a.base, p) == vb && mapped(a.marks, p) == mb) return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

inline std::int64_t brute_aut(const MarkedDiagram& md) {
  std::vector<int> p(md.base.half_edges);
  std::iota(p.begin(), p.end(), 0);
  const auto e0 = edge_blocks(md.base, p);
  const auto v0 = vertex_blocks(md.base, p);
  const std::set<int> m0(md.marks.begin(), md.marks.end());
  std::int64_t count = 0;
  do {
    if (edge_blocks(md.base, p) == e0 && vertex_blocks(md.base, p) == v0 && mapped(md.marks, p) == m0) ++count;
  } while (std::next_permutation(p.begin(), p.end()));
  return count;
}

// All admissible marking subsets: at most one marked half-edge per vertex.
inline std::vector<MarkedDiagram> all_marking_subsets(const Diagram& d) {
  std::vector<MarkedDiagram> out;
  std::vector<int> choice(d.vertices.size(), -1);
  auto rec = [&](auto&& self, std::size_t v) -> void {
    if (v == d.vertices.size()) {
      MarkedDiagram md{d, {}};
      for (std::size_t k = 0; k < choice.size(); ++k)
        if (choice[k] >= 0) md.marks.push_back(d.vertices[k][choice[k]]);
      std::sort(md.marks.begin(), md.marks.end());
      out.push_back(md);
      return;
    }
    for (int c = -1; c < static_cast<int>(d.vertices[v].size()); ++c) {
      choice[v] = c;
      self(self, v + 1);
    }
  };
  rec(rec, 0);
  return out;
}

// Oracle census of unmarked connected diagrams: every perfect matching of
// half-edges for every degree sequence, deduplicated by the adjacency matrix
// minimized over all vertex permutations.
inline int census(int loops) {
  std::set<std::vector<int>> forms;
  for (int nv = 1; nv <= 2 * loops - 2; ++nv) {
    const int ne = nv + loops - 1;
    const int nh = 2 * ne;
    std::vector<int> deg(nv, 3);
    auto degree_rec = [&](auto&& self, int v, int left, int cap) -> void {
      if (v == nv) {
        if (left != 0) return;
        std::vector<int> owner;
        for (int k = 0; k < nv; ++k)
          for (int j = 0; j < deg[k]; ++j) owner.push_back(k);
        std::vector<int> partner(nh, -1);
        auto match = [&](auto&& m) -> void {
          int first = 0;
          while (first < nh && partner[first] != -1) ++first;
          if (first == nh) {
            std::vector<int> adj(nv * nv, 0);
            for (int h = 0; h < nh; ++h)
              if (h < partner[h]) {
                ++adj[owner[h] * nv + owner[partner[h]]];
                if (owner[h] != owner[partner[h]]) ++adj[owner[partner[h]] * nv + owner[h]];
              }
            std::vector<int> reach{0};
            std::vector<bool> seen(nv, false);
            seen[0] = true;
            for (std::size_t i = 0; i < reach.size(); ++i)
              for (int w = 0; w < nv; ++w)
                if (!seen[w] && adj[reach[i] * nv + w]) {
                  seen[w] = true;
                  reach.push_back(w);
                }
            if (static_cast<int>(reach.size()) != nv) return;
            std::vector<int> perm(nv), best;
            std::iota(perm.begin(), perm.end(), 0);
            do {
              std::vector<int> f(nv * nv);
              for (int a = 0; a < nv; ++a)
                for (int b = 0; b < nv; ++b) f[perm[a] * nv + perm[b]] = adj[a * nv + b];
              if (best.empty() || f < best) best = f;
            } while (std::next_permutation(perm.begin(), perm.end()));
            best.insert(best.begin(), nv);
            forms.insert(best);
            return;
          }
          for (int h = first + 1; h < nh; ++h)
            if (partner[h] == -1) {
              partner[first] = h;
              partner[h] = first;
              m(m);
              partner[first] = partner[h] = -1;
            }
        };
        match(match);
        return;
      }
      for (int d = 3; d <= std::min(cap, left); ++d) {
        deg[v] = d;
        self(self, v + 1, left - d, d);
      }
    };
    degree_rec(degree_rec, 0, nh, nh);
  }
  return static_cast<int>(forms.size());
}

}  // namespace semiprop::testing
