// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "semiprop/series.hpp"
#include "systems.hpp"

using namespace semiprop;
using namespace semiprop::testing;

TEST_CASE("series arithmetic") {
  const HbarSeries a({0.0, 0.3, -0.2, 0.1});
  const auto e = series_exp(a);
  // Taylor oracle for exp(a1 x + a2 x^2 + a3 x^3).
  const double a1 = 0.3, a2 = -0.2, a3 = 0.1;
  CHECK(e[0] == doctest::Approx(1.0));
  CHECK(e[1] == doctest::Approx(a1));
  CHECK(e[2] == doctest::Approx(a2 + a1 * a1 / 2));
  CHECK(e[3] == doctest::Approx(a3 + a1 * a2 + a1 * a1 * a1 / 6));
  CHECK_THROWS(series_exp(HbarSeries({1.0, 0.5})));

  const HbarSeries p({1.0, 2.0, 3.0}), q({4.0, 5.0});
  const auto m = series_mul(p, q);
  REQUIRE(m.order() == 1);
  CHECK(m[0] == 4.0);
  CHECK(m[1] == 13.0);
  CHECK(series_add(p, q)[1] == 7.0);
  CHECK(series_add(p, q).order() == 1);
  CHECK(p[7] == 0.0);
}

TEST_CASE("free particle") {
  const double t = 1.7;
  const auto r = compute_V(free_particle(2), t, vec({0.0, 1.0}), vec({1.0, -1.0}), 3);
  REQUIRE(r.v.order() == 3);
  CHECK(r.v[0] == doctest::Approx(-5.0 / (2 * t)).epsilon(1e-10));
  CHECK(r.v[1] == doctest::Approx(-std::log(t)).epsilon(1e-10));
  CHECK(r.v[2] == 0.0);
  CHECK(r.v[3] == 0.0);
  CHECK(r.v0[0] == doctest::Approx(1.0 / t));
}

TEST_CASE("harmonic oscillator") {
  const double t = 1.1, a = 0.4, b = -0.3;
  const auto r = compute_V(harmonic(), t, vec({a}), vec({b}), 3);
  const double s = ((a * a + b * b) * std::cos(t) - 2 * a * b) / (2 * std::sin(t));
  CHECK(r.v[0] == doctest::Approx(-s).epsilon(1e-10));
  CHECK(r.v[1] == doctest::Approx(-0.5 * std::log(std::sin(t))).epsilon(1e-10));
  CHECK(r.v[2] == 0.0);
  CHECK(r.v[3] == 0.0);
  // Beyond pi the determinant changes sign but the logarithm uses |det|.
  const auto past = compute_V(harmonic(), 4.0, vec({0.0}), vec({0.5}), 1);
  CHECK(past.v[1] == doctest::Approx(-0.5 * std::log(std::abs(std::sin(4.0)))).epsilon(1e-9));
}

TEST_CASE("quartic at rest") {
  // Only the figure-eight survives: 24^2 int (s(1-s))^2 ds / 8.
  const auto r = compute_V(quartic(), 1.0, vec({0.0}), vec({0.0}), 2);
  CHECK(r.v[2] == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(r.diagrams.size() == 12);
  const auto parts = propagator_parts(r);
  CHECK(parts.phase == doctest::Approx(0.0));
  CHECK(parts.vanvleck == doctest::Approx(1.0));
  REQUIRE(parts.correction.order() == 1);
  CHECK(parts.correction[1] == doctest::Approx(0.1).epsilon(1e-10));
}

TEST_CASE("propagator parts of a three-loop series") {
  SeriesResult r;
  r.v = HbarSeries({-1.0, 0.2, 0.3, -0.4});
  r.logdet = 0.2;
  const auto p = propagator_parts(r);
  CHECK(p.phase == -1.0);
  CHECK(p.vanvleck == doctest::Approx(std::exp(0.2)));
  REQUIRE(p.correction.order() == 2);
  CHECK(p.correction[1] == doctest::Approx(0.3));
  CHECK(p.correction[2] == doctest::Approx(-0.4 + 0.045));
}

TEST_CASE("quadratic systems have no loop corrections") {
  const auto spec = parse(R"({"n": 2, "C": [{"c": 0.5, "e": [2, 0]}, {"c": 0.1, "e": [1, 1]}],
    "B": [[{"c": -0.5, "e": [0, 1]}], [{"c": 0.5, "e": [1, 0]}, {"c": 0.2, "e": [0, 1]}]]})");
  const auto r = compute_V(spec, 0.9, vec({0.1, 0.2}), vec({0.4, -0.3}), 3);
  CHECK(r.v[2] == 0.0);
  CHECK(r.v[3] == 0.0);
}

TEST_CASE("diagram catalog is built once") {
  const auto& a = diagram_catalog(3);
  const auto& b = diagram_catalog(3);
  CHECK(&a == &b);
  for (const auto& e : a) {
    CHECK(e.loops >= 2);
    CHECK(e.loops <= 3);
    CHECK(e.aut >= 1);
  }
  CHECK(diagram_catalog(1).empty());
}

TEST_CASE("reciprocity under reversal of the field") {
  const auto spec = magnetic_2d();
  auto flipped = nlohmann::json::parse(spec.to_json().dump());
  for (auto& comp : flipped["B"])
    for (auto& term : comp) term["c"] = -term["c"].get<double>();
  const auto reversed = PotentialSpec::from_json(flipped);
  const Vec q0 = vec({0.1, -0.2}), q1 = vec({0.3, 0.2});
  const auto fwd = compute_V(spec, 0.6, q0, q1, 2);
  const auto bwd = compute_V(reversed, 0.6, q1, q0, 2);
  for (int k = 0; k <= 2; ++k) CHECK(std::abs(fwd.v[k] - bwd.v[k]) < 1e-8);
  CHECK(std::abs(fwd.v[2]) > 1e-4);
}
