// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace semiprop {

/// Closed Feynman diagram: half-edges 0..half_edges-1 partitioned into edges
/// (pairs) and vertices (blocks of size >= 3).
struct Diagram {
  int half_edges = 0;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::vector<int>> vertices;
};

/// Diagram with a set of marked half-edges, at most one per vertex.
struct MarkedDiagram {
  Diagram base;
  std::vector<int> marks;  // sorted half-edge ids

  bool is_marked(int h) const;
};

/// Throws std::invalid_argument unless the partitions and marking are valid.
void validate(const MarkedDiagram& md);

int euler_char(const Diagram& d);
int component_count(const Diagram& d);
int loop_number(const Diagram& d);

/// Number of half-edge bijections preserving edges, vertices and marks.
std::int64_t automorphism_order(const MarkedDiagram& md);

/// Isomorphism-invariant key, e.g. "2|0-0,0-1a,1-1". Each edge is written
/// "a-b" between canonically numbered vertices with a suffix naming the
/// marked end(s): "a", "b", "ab" (or "m" for a marked self-loop).
std::string canonical_key(const MarkedDiagram& md);

/// Rebuilds a diagram from its canonical key.
MarkedDiagram diagram_from_key(const std::string& key);

/// Connected unmarked diagrams with 2 <= loops <= max_loops (max_loops <= 4).
std::vector<MarkedDiagram> enumerate_topologies(int max_loops);

/// All inequivalent markings (including none) of one diagram.
std::vector<MarkedDiagram> enumerate_markings(const Diagram& d);

/// Connected marked diagrams with 2 <= loops <= max_loops, ordered by loop
/// number, then topology, then key.
std::vector<MarkedDiagram> enumerate_connected(int max_loops);

inline constexpr int kMaxLoops = 4;

}  // namespace semiprop
