// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "semiprop/diagrams.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace semiprop {

bool MarkedDiagram::is_marked(int h) const { return std::binary_search(marks.begin(), marks.end(), h); }

namespace {

struct Incidence {
  std::vector<int> partner;
  std::vector<int> vertex_of;
};

Incidence incidence(const Diagram& d) {
  Incidence inc{std::vector<int>(d.half_edges, -1), std::vector<int>(d.half_edges, -1)};
  for (const auto& e : d.edges) {
    inc.partner[e[0]] = e[1];
    inc.partner[e[1]] = e[0];
  }
  for (std::size_t v = 0; v < d.vertices.size(); ++v)
    for (int h : d.vertices[v]) inc.vertex_of[h] = static_cast<int>(v);
  return inc;
}

// Edge between canonically numbered vertices a <= b. state bit 0: the end at
// a is marked; bit 1: the end at b is marked. Self-loops use bit 0 only.
struct ColoredEdge {
  int a, b, state;
  auto operator<=>(const ColoredEdge&) const = default;
};

struct Multigraph {
  int nv = 0;
  std::vector<ColoredEdge> edges;
};

ColoredEdge normalized(int a, int b, bool mark_a, bool mark_b) {
  if (a > b) {
    std::swap(a, b);
    std::swap(mark_a, mark_b);
  }
  int state = (mark_a ? 1 : 0) | (mark_b ? 2 : 0);
  if (a == b && state != 0) state = 1;
  return {a, b, state};
}

Multigraph to_multigraph(const MarkedDiagram& md) {
  const auto inc = incidence(md.base);
  Multigraph g;
  g.nv = static_cast<int>(md.base.vertices.size());
  for (const auto& e : md.base.edges)
    g.edges.push_back(normalized(inc.vertex_of[e[0]], inc.vertex_of[e[1]], md.is_marked(e[0]), md.is_marked(e[1])));
  return g;
}

MarkedDiagram from_multigraph(const Multigraph& g) {
  MarkedDiagram md;
  md.base.half_edges = 2 * static_cast<int>(g.edges.size());
  md.base.vertices.assign(g.nv, {});
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const int h0 = 2 * static_cast<int>(k), h1 = h0 + 1;
    const auto& e = g.edges[k];
    md.base.edges.push_back({h0, h1});
    md.base.vertices[e.a].push_back(h0);
    md.base.vertices[e.b].push_back(h1);
    if (e.state & 1) md.marks.push_back(h0);
    if ((e.state & 2) && e.a != e.b) md.marks.push_back(h1);
  }
  std::sort(md.marks.begin(), md.marks.end());
  return md;
}

// Unmarked skeleton (a, b) pairs, sorted.
using Skeleton = std::vector<std::pair<int, int>>;

Skeleton permuted_skeleton(const Multigraph& g, const std::vector<int>& perm) {
  Skeleton s;
  s.reserve(g.edges.size());
  for (const auto& e : g.edges) {
    int a = perm[e.a], b = perm[e.b];
    if (a > b) std::swap(a, b);
    s.emplace_back(a, b);
  }
  std::sort(s.begin(), s.end());
  return s;
}

std::vector<ColoredEdge> permuted_edges(const Multigraph& g, const std::vector<int>& perm) {
  std::vector<ColoredEdge> out;
  out.reserve(g.edges.size());
  for (const auto& e : g.edges)
    out.push_back(normalized(perm[e.a], perm[e.b], e.state & 1, (e.state & 2) != 0));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> degrees(const Multigraph& g) {
  std::vector<int> deg(g.nv, 0);
  for (const auto& e : g.edges) {
    ++deg[e.a];
    ++deg[e.b];
  }
  return deg;
}

// All vertex relabelings that bring the unmarked skeleton to its minimal
// form, together with that form.
struct SkeletonCanon {
  Skeleton skeleton;
  std::vector<std::vector<int>> perms;
};

SkeletonCanon canonical_skeleton(const Multigraph& g) {
  if (g.nv > 9) throw std::invalid_argument("canonicalization limited to 9 vertices");
  const auto deg = degrees(g);
  // Vertex order: relabel only within equal-degree classes, high degree first.
  std::vector<int> order(g.nv);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return deg[x] > deg[y]; });
  SkeletonCanon best;
  bool first = true;
  std::vector<int> slots(g.nv);
  std::iota(slots.begin(), slots.end(), 0);
  // perm[v] = new label. Enumerate assignments of labels to `order` respecting degree classes.
  std::vector<int> labels = slots;
  do {
    bool ok = true;
    for (int k = 0; k < g.nv && ok; ++k)
      ok = deg[order[k]] == deg[order[labels[k]]];
    if (!ok) continue;
    std::vector<int> perm(g.nv);
    for (int k = 0; k < g.nv; ++k) perm[order[labels[k]]] = k;
    auto s = permuted_skeleton(g, perm);
    if (first || s < best.skeleton) {
      best.skeleton = std::move(s);
      best.perms.clear();
      best.perms.push_back(std::move(perm));
      first = false;
    } else if (s == best.skeleton) {
      best.perms.push_back(std::move(perm));
    }
  } while (std::next_permutation(labels.begin(), labels.end()));
  return best;
}

std::vector<ColoredEdge> canonical_edges(const Multigraph& g, const SkeletonCanon& canon) {
  std::vector<ColoredEdge> best;
  bool first = true;
  for (const auto& perm : canon.perms) {
    auto e = permuted_edges(g, perm);
    if (first || e < best) {
      best = std::move(e);
      first = false;
    }
  }
  return best;
}

std::string encode(int nv, const std::vector<ColoredEdge>& edges) {
  std::ostringstream os;
  os << nv << '|';
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    if (k) os << ',';
    os << e.a << '-' << e.b;
    if (e.a == e.b) {
      if (e.state) os << 'm';
    } else {
      if (e.state & 1) os << 'a';
      if (e.state & 2) os << 'b';
    }
  }
  return os.str();
}

bool connected(const Multigraph& g) {
  std::vector<int> parent(g.nv);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : g.edges) parent[find(e.a)] = find(e.b);
  for (int v = 0; v < g.nv; ++v)
    if (find(v) != find(0)) return false;
  return true;
}

void degree_sequences(int nv, int total, int max_deg, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == nv) {
    if (total == 0) out.push_back(cur);
    return;
  }
  const int left = nv - static_cast<int>(cur.size());
  for (int d = std::min(max_deg, total - 3 * (left - 1)); d >= 3; --d) {
    cur.push_back(d);
    degree_sequences(nv, total - d, d, cur, out);
    cur.pop_back();
  }
}

// Fills adjacency multiplicities pair by pair; loops count twice.
void fill_adjacency(int nv, int i, int j, std::vector<int>& rem, std::vector<ColoredEdge>& edges,
                    std::vector<Multigraph>& out) {
  if (i == nv) {
    out.push_back({nv, edges});
    return;
  }
  if (j == nv) {
    if (rem[i] != 0) return;
    fill_adjacency(nv, i + 1, i + 1, rem, edges, out);
    return;
  }
  const int max_mult = i == j ? rem[i] / 2 : std::min(rem[i], rem[j]);
  for (int m = 0; m <= max_mult; ++m) {
    const int use_i = i == j ? 2 * m : m;
    rem[i] -= use_i;
    if (i != j) rem[j] -= m;
    for (int k = 0; k < m; ++k) edges.push_back({i, j, 0});
    fill_adjacency(nv, i, j + 1, rem, edges, out);
    for (int k = 0; k < m; ++k) edges.pop_back();
    rem[i] += use_i;
    if (i != j) rem[j] += m;
  }
}

}  // namespace

void validate(const MarkedDiagram& md) {
  const auto& d = md.base;
  const int h = d.half_edges;
  std::vector<int> in_edge(h, 0), in_vertex(h, 0);
  for (const auto& e : d.edges)
    for (int x : e) {
      if (x < 0 || x >= h) throw std::invalid_argument("edge refers to unknown half-edge");
      ++in_edge[x];
    }
  for (const auto& e : d.edges)
    if (e[0] == e[1]) throw std::invalid_argument("edge blocks must have size exactly 2");
  for (const auto& v : d.vertices) {
    if (v.size() < 3) throw std::invalid_argument("vertex blocks must have size >= 3");
    for (int x : v) {
      if (x < 0 || x >= h) throw std::invalid_argument("vertex refers to unknown half-edge");
      ++in_vertex[x];
    }
  }
  for (int x = 0; x < h; ++x)
    if (in_edge[x] != 1 || in_vertex[x] != 1)
      throw std::invalid_argument("edges and vertices must each partition the half-edges");
  if (!std::is_sorted(md.marks.begin(), md.marks.end()) ||
      std::adjacent_find(md.marks.begin(), md.marks.end()) != md.marks.end())
    throw std::invalid_argument("marks must be sorted and distinct");
  for (const auto& v : d.vertices) {
    const auto count = std::count_if(v.begin(), v.end(), [&](int x) { return md.is_marked(x); });
    if (count > 1) throw std::invalid_argument("at most one marked half-edge per vertex");
  }
}

int euler_char(const Diagram& d) { return static_cast<int>(d.vertices.size()) - static_cast<int>(d.edges.size()); }

int component_count(const Diagram& d) {
  std::vector<int> parent(d.half_edges);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
  for (const auto& e : d.edges) unite(e[0], e[1]);
  for (const auto& v : d.vertices)
    for (std::size_t k = 1; k < v.size(); ++k) unite(v[0], v[k]);
  std::set<int> roots;
  for (int x = 0; x < d.half_edges; ++x) roots.insert(find(x));
  return static_cast<int>(roots.size());
}

int loop_number(const Diagram& d) { return component_count(d) - euler_char(d); }

std::int64_t automorphism_order(const MarkedDiagram& md) {
  validate(md);
  const auto& d = md.base;
  const int h = d.half_edges;
  if (h == 0) return 1;
  const auto inc = incidence(d);
  std::vector<char> marked(h, 0);
  for (int x : md.marks) marked[x] = 1;
  std::vector<int> deg(d.vertices.size());
  for (std::size_t v = 0; v < d.vertices.size(); ++v) deg[v] = static_cast<int>(d.vertices[v].size());

  std::vector<int> image(h, -1), used(h, 0);
  std::vector<int> vmap(d.vertices.size(), -1), vused(d.vertices.size(), 0);

  // Tries to map x -> y; records undo information in `trail`.
  struct Undo {
    int half_edge;
    int vertex;  // -1 when the vertex map was already set
  };
  auto assign = [&](int x, int y, std::vector<Undo>& trail) -> bool {
    if (image[x] != -1) return image[x] == y;
    if (used[y] || marked[x] != marked[y]) return false;
    const int vx = inc.vertex_of[x], vy = inc.vertex_of[y];
    if (deg[vx] != deg[vy]) return false;
    int new_vertex = -1;
    if (vmap[vx] == -1) {
      if (vused[vy]) return false;
      vmap[vx] = vy;
      vused[vy] = 1;
      new_vertex = vx;
    } else if (vmap[vx] != vy) {
      return false;
    }
    image[x] = y;
    used[y] = 1;
    trail.push_back({x, new_vertex});
    return true;
  };
  auto undo = [&](std::vector<Undo>& trail) {
    for (auto it = trail.rbegin(); it != trail.rend(); ++it) {
      used[image[it->half_edge]] = 0;
      image[it->half_edge] = -1;
      if (it->vertex != -1) {
        vused[vmap[it->vertex]] = 0;
        vmap[it->vertex] = -1;
      }
    }
    trail.clear();
  };

  std::int64_t count = 0;
  auto search = [&](auto&& self, int x) -> void {
    while (x < h && image[x] != -1) ++x;
    if (x == h) {
      ++count;
      return;
    }
    for (int y = 0; y < h; ++y) {
      std::vector<Undo> trail;
      if (assign(x, y, trail) && assign(inc.partner[x], inc.partner[y], trail)) self(self, x + 1);
      undo(trail);
    }
  };
  search(search, 0);
  return count;
}

std::string canonical_key(const MarkedDiagram& md) {
  validate(md);
  const auto g = to_multigraph(md);
  const auto canon = canonical_skeleton(g);
  return encode(g.nv, canonical_edges(g, canon));
}

MarkedDiagram diagram_from_key(const std::string& key) {
  const auto bar = key.find('|');
  if (bar == std::string::npos) throw std::invalid_argument("diagram key must look like 'V|a-b,...'");
  Multigraph g;
  try {
    g.nv = std::stoi(key.substr(0, bar));
  } catch (const std::exception&) {
    throw std::invalid_argument("diagram key has no vertex count");
  }
  std::stringstream ss(key.substr(bar + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) throw std::invalid_argument("malformed edge '" + item + "'");
    std::size_t pos = 0;
    const int a = std::stoi(item.substr(0, dash));
    const std::string rest = item.substr(dash + 1);
    const int b = std::stoi(rest, &pos);
    const std::string suffix = rest.substr(pos);
    if (a < 0 || b < 0 || a >= g.nv || b >= g.nv) throw std::invalid_argument("edge vertex out of range");
    bool ma = false, mb = false;
    if (suffix == "m" && a == b) {
      ma = true;
    } else if (suffix == "a") {
      ma = true;
    } else if (suffix == "b") {
      mb = true;
    } else if (suffix == "ab") {
      ma = mb = true;
    } else if (!suffix.empty()) {
      throw std::invalid_argument("unknown edge suffix '" + suffix + "'");
    }
    g.edges.push_back(normalized(a, b, ma, mb));
  }
  auto md = from_multigraph(g);
  validate(md);
  return md;
}

std::vector<MarkedDiagram> enumerate_topologies(int max_loops) {
  if (max_loops > kMaxLoops) throw std::invalid_argument("loop order is limited to 4");
  std::vector<MarkedDiagram> out;
  for (int loops = 2; loops <= max_loops; ++loops) {
    std::map<std::string, Multigraph> found;
    for (int nv = 1; nv <= 2 * loops - 2; ++nv) {
      const int ne = nv + loops - 1;
      std::vector<std::vector<int>> seqs;
      std::vector<int> cur;
      degree_sequences(nv, 2 * ne, 2 * ne, cur, seqs);
      for (const auto& seq : seqs) {
        std::vector<Multigraph> graphs;
        std::vector<int> rem = seq;
        std::vector<ColoredEdge> edges;
        fill_adjacency(nv, 0, 0, rem, edges, graphs);
        for (const auto& g : graphs) {
          if (!connected(g)) continue;
          const auto canon = canonical_skeleton(g);
          Multigraph c{g.nv, canonical_edges(g, canon)};
          found.emplace(encode(c.nv, c.edges), c);
        }
      }
    }
    for (const auto& [key, g] : found) out.push_back(from_multigraph(g));
  }
  return out;
}

std::vector<MarkedDiagram> enumerate_markings(const Diagram& d) {
  MarkedDiagram unmarked{d, {}};
  validate(unmarked);
  const auto g0 = to_multigraph(unmarked);
  const auto canon = canonical_skeleton(g0);
  std::map<std::string, Multigraph> found;
  const auto& vertices = d.vertices;
  std::vector<int> choice(vertices.size(), -1);
  auto recurse = [&](auto&& self, std::size_t v) -> void {
    if (v == vertices.size()) {
      MarkedDiagram md{d, {}};
      for (std::size_t k = 0; k < vertices.size(); ++k)
        if (choice[k] >= 0) md.marks.push_back(vertices[k][choice[k]]);
      std::sort(md.marks.begin(), md.marks.end());
      const auto g = to_multigraph(md);
      Multigraph c{g.nv, canonical_edges(g, canon)};
      found.emplace(encode(c.nv, c.edges), c);
      return;
    }
    for (int c = -1; c < static_cast<int>(vertices[v].size()); ++c) {
      choice[v] = c;
      self(self, v + 1);
    }
  };
  recurse(recurse, 0);
  std::vector<MarkedDiagram> out;
  for (const auto& [key, g] : found) out.push_back(from_multigraph(g));
  return out;
}

std::vector<MarkedDiagram> enumerate_connected(int max_loops) {
  std::vector<MarkedDiagram> out;
  for (const auto& topo : enumerate_topologies(max_loops)) {
    auto marked = enumerate_markings(topo.base);
    out.insert(out.end(), std::make_move_iterator(marked.begin()), std::make_move_iterator(marked.end()));
  }
  return out;
}

}  // namespace semiprop
