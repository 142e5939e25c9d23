// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "diagram_oracles.hpp"
#include "semiprop/diagrams.hpp"

using namespace semiprop;
using namespace semiprop::testing;

namespace {

Diagram figure_eight() { return {4, {{0, 1}, {2, 3}}, {{0, 1, 2, 3}}}; }
Diagram theta() { return {6, {{0, 3}, {1, 4}, {2, 5}}, {{0, 1, 2}, {3, 4, 5}}}; }
Diagram dumbbell() { return {6, {{0, 1}, {2, 3}, {4, 5}}, {{0, 1, 2}, {3, 4, 5}}}; }

MarkedDiagram relabeled(const MarkedDiagram& md, std::mt19937_64& rng) {
  std::vector<int> p(md.base.half_edges);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  MarkedDiagram out;
  out.base.half_edges = md.base.half_edges;
  for (const auto& e : md.base.edges) out.base.edges.push_back({p[e[1]], p[e[0]]});
  std::shuffle(out.base.edges.begin(), out.base.edges.end(), rng);
  for (const auto& v : md.base.vertices) {
    std::vector<int> b;
    for (int h : v) b.push_back(p[h]);
    std::shuffle(b.begin(), b.end(), rng);
    out.base.vertices.push_back(b);
  }
  std::shuffle(out.base.vertices.begin(), out.base.vertices.end(), rng);
  for (int h : md.marks) out.marks.push_back(p[h]);
  std::sort(out.marks.begin(), out.marks.end());
  return out;
}

}  // namespace

TEST_CASE("Euler characteristic and loop number") {
  CHECK(euler_char(figure_eight()) == -1);
  CHECK(loop_number(figure_eight()) == 2);
  CHECK(euler_char(theta()) == -1);
  CHECK(loop_number(theta()) == 2);
  const Diagram empty{};
  CHECK(euler_char(empty) == 0);
  CHECK(loop_number(empty) == 0);
  CHECK(component_count(empty) == 0);
}

TEST_CASE("validation rejects malformed diagrams") {
  CHECK_THROWS(validate({{3, {{0, 1}}, {{0, 1, 2}}}, {}}));
  CHECK_THROWS(validate({{4, {{0, 1}, {2, 3}}, {{0, 1}, {2, 3}}}, {}}));
  CHECK_THROWS(validate({theta(), {0, 1}}));
  CHECK_NOTHROW(validate({theta(), {0, 3}}));
}

TEST_CASE("unmarked census at two loops") {
  const auto topo = enumerate_topologies(2);
  REQUIRE(topo.size() == 3);
  std::multiset<std::int64_t> auts;
  for (const auto& d : topo) {
    auts.insert(automorphism_order(d));
    CHECK(automorphism_order(d) == brute_aut(d));
  }
  CHECK(auts == std::multiset<std::int64_t>{8, 8, 12});
  CHECK(automorphism_order({figure_eight(), {}}) == 8);
  CHECK(automorphism_order({theta(), {}}) == 12);
  CHECK(automorphism_order({dumbbell(), {}}) == 8);
  CHECK(enumerate_connected(1).empty());
  CHECK(enumerate_topologies(0).empty());
}

TEST_CASE("topology census agrees with matching enumeration") {
  for (int L : {2, 3}) {
    int ours = 0;
    for (const auto& d : enumerate_topologies(L))
      if (loop_number(d.base) == L) ++ours;
    CHECK(ours == census(L));
  }
}

TEST_CASE("marked census agrees with exhaustive subsets") {
  int total = 0;
  for (const auto& topo : enumerate_topologies(2)) {
    const auto ours = enumerate_markings(topo.base);
    const auto subsets = all_marking_subsets(topo.base);
    // Classes of subsets under brute-force isomorphism.
    std::vector<MarkedDiagram> reps;
    for (const auto& m : subsets)
      if (std::none_of(reps.begin(), reps.end(), [&](const auto& r) { return brute_isomorphic(m, r); }))
        reps.push_back(m);
    CHECK(ours.size() == reps.size());
    // Orbit counting: sum over classes of |Aut(G)| / |Aut(G, M)| = number of subsets.
    const auto aut = automorphism_order(topo);
    std::int64_t orbit_sum = 0;
    for (const auto& m : ours) {
      CHECK(automorphism_order(m) == brute_aut(m));
      orbit_sum += aut / automorphism_order(m);
    }
    CHECK(orbit_sum == static_cast<std::int64_t>(subsets.size()));
    total += static_cast<int>(ours.size());
  }
  CHECK(total == 12);
  CHECK(enumerate_connected(2).size() == 12);
}

TEST_CASE("canonical keys") {
  std::mt19937_64 rng(3);
  const MarkedDiagram th{theta(), {}};
  for (int k = 0; k < 10; ++k) CHECK(canonical_key(relabeled(th, rng)) == canonical_key(th));
  CHECK(canonical_key(th) != canonical_key({dumbbell(), {}}));
  CHECK(canonical_key({figure_eight(), {}}) != canonical_key({figure_eight(), {0}}));
  for (const auto& md : enumerate_connected(3)) {
    const auto key = canonical_key(md);
    CHECK(canonical_key(relabeled(md, rng)) == key);
    CHECK(canonical_key(diagram_from_key(key)) == key);
  }
  CHECK_THROWS(diagram_from_key("2|0-1,0-1"));
  CHECK_THROWS(diagram_from_key("nonsense"));
  CHECK_THROWS(diagram_from_key("1|0-0m,0-0m"));
}

TEST_CASE("enumeration invariants up to three loops") {
  const auto all = enumerate_connected(3);
  std::set<std::string> keys;
  for (const auto& md : all) {
    keys.insert(canonical_key(md));
    const auto& d = md.base;
    std::size_t valence = 0;
    for (const auto& v : d.vertices) valence += v.size();
    CHECK(valence == 2 * d.edges.size());
    CHECK(static_cast<int>(d.edges.size() - d.vertices.size()) + 1 == loop_number(d));
    CHECK(component_count(d) == 1);
    CHECK(loop_number(d) >= 2);
    CHECK(loop_number(d) <= 3);
  }
  CHECK(keys.size() == all.size());
  CHECK_THROWS(enumerate_connected(5));
}
