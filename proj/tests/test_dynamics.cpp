// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "semiprop/dynamics.hpp"
#include "semiprop/errors.hpp"
#include "systems.hpp"

using namespace semiprop;
using namespace semiprop::testing;
using std::numbers::pi;

namespace {

double harmonic_action(double t, double q0, double q1) {
  return ((q0 * q0 + q1 * q1) * std::cos(t) - 2 * q0 * q1) / (2 * std::sin(t));
}

}  // namespace

TEST_CASE("flow of the free particle") {
  const auto path = flow(free_particle(), {vec({0.0}), vec({1.0})}, 2.0);
  CHECK(path.q_end()[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(path.v_end()[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("flow of the harmonic oscillator over a quarter period") {
  const auto path = flow(harmonic(), {vec({0.0}), vec({1.0})}, pi / 2);
  CHECK(std::abs(path.q_end()[0] - 1.0) < 1e-8);
  CHECK(std::abs(path.v_end()[0]) < 1e-8);
  for (double tau : {0.1, 0.37, 1.2}) CHECK(std::abs(path.at(tau).q[0] - std::sin(tau)) < 1e-8);
}

TEST_CASE("cyclotron orbit keeps its speed") {
  const auto path = flow(uniform_field(1.0), {vec({0.0, 0.0}), vec({1.0, 0.0})}, 4.0);
  for (int k = 0; k <= 40; ++k) CHECK(std::abs(path.at(0.1 * k).v.norm() - 1.0) < 1e-8);
  // Unit field, unit speed: a circle of radius 1 through the origin.
  const auto s = path.at(1.3);
  CHECK(std::abs(s.q[0] - std::sin(1.3)) < 1e-8);
  CHECK(std::abs(std::abs(s.q[1]) - (1 - std::cos(1.3))) < 1e-8);
}

TEST_CASE("variational frame starts at the identity and matches re-integration") {
  const auto spec = magnetic_2d();
  const PhaseState s0{vec({0.2, -0.1}), vec({0.5, 0.3})};
  const auto path = flow(spec, s0, 0.9);
  CHECK((path.at(0.0).variational - Mat::Identity(4, 4)).norm() < 1e-14);
  const Mat b = path.end().dq_dv0();
  const double h = 1e-4;
  for (int j = 0; j < 2; ++j) {
    PhaseState up = s0, down = s0;
    up.v[j] += h;
    down.v[j] -= h;
    const Vec fd = (flow(spec, up, 0.9).q_end() - flow(spec, down, 0.9).q_end()) / (2 * h);
    CHECK((fd - b.col(j)).norm() < 1e-7);
  }
}

TEST_CASE("equation of motion residual is small along the dense output") {
  const auto spec = magnetic_2d();
  const auto path = flow(spec, {vec({0.2, -0.1}), vec({0.5, 0.3})}, 0.9);
  const auto& grid = path.grid();
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double mid = 0.5 * (grid[k] + grid[k + 1]);
    if (mid < 1e-3 || mid > 0.9 - 1e-3) continue;
    CHECK(path.eom_residual(mid, 1e-3) < 1e-5);
  }
}

TEST_CASE("blow-up is reported with an estimate of the blow-up time") {
  // q'' = 2 q^3 has the solution 1/(1 - tau) from q = v = 1.
  const auto spec = parse(R"({"n": 1, "C": [{"c": -0.5, "e": [4]}]})");
  try {
    flow(spec, {vec({1.0}), vec({1.0})}, 2.0);
    FAIL("expected StepSizeUnderflow");
  } catch (const StepSizeUnderflow& e) {
    CHECK(e.blowup_time() == doctest::Approx(1.0).epsilon(1e-2));
  }
}

TEST_CASE("shooting") {
  SUBCASE("free particle is solved by one Newton step") {
    ShootOptions o;
    o.polish_steps = 0;
    const auto path = shoot(free_particle(), 2.0, vec({0.5}), vec({1.7}), vec({5.0}), o);
    CHECK(path.iterations == 1);
    CHECK(std::abs(path.v0()[0] - 0.6) < 1e-12);
  }
  SUBCASE("harmonic quarter period") {
    const auto path = shoot(harmonic(), pi / 2, vec({0.0}), vec({1.0}));
    CHECK(std::abs(path.v0()[0] - 1.0) < 1e-8);
    CHECK(path.terminal_error < 1e-9);
  }
  SUBCASE("harmonic half period is degenerate") {
    CHECK_THROWS_AS(shoot(harmonic(), pi, vec({0.0}), vec({0.3})), DegenerateJacobian);
  }
  SUBCASE("guess selects the branch") {
    const auto slow = shoot(quartic(), 0.5, vec({0.0}), vec({0.3}));
    const auto fast = shoot(quartic(), 0.5, vec({0.0}), vec({0.3}), vec({20.0}));
    CHECK(std::abs(slow.q_end()[0] - 0.3) < 1e-9);
    CHECK(std::abs(fast.q_end()[0] - 0.3) < 1e-9);
    CHECK(std::abs(fast.v0()[0] - slow.v0()[0]) > 1.0);
  }
}

TEST_CASE("action") {
  const auto free = shoot(free_particle(), 2.0, vec({0.5}), vec({1.7}));
  CHECK(action(free) == doctest::Approx(1.2 * 1.2 / 4.0).epsilon(1e-12));
  const auto constant = parse(R"({"n": 1, "C": [{"c": 0.7, "e": [0]}]})");
  CHECK(action(shoot(constant, 1.5, vec({0.2}), vec({0.2}))) == doctest::Approx(-0.7 * 1.5).epsilon(1e-12));
  for (auto [t, q0, q1] : {std::tuple{1.0, 0.0, 1.0}, {0.4, -0.3, 0.8}, {2.5, 1.0, 0.2}})
    CHECK(std::abs(action(shoot(harmonic(), t, vec({q0}), vec({q1}))) - harmonic_action(t, q0, q1)) < 1e-8);
}

TEST_CASE("boundary momentum identities") {
  {
    const auto [r0, r1] = boundary_momentum_residual(shoot(free_particle(), 1.0, vec({0.0}), vec({1.0})));
    CHECK(r0.norm() < 1e-8);
    CHECK(r1.norm() < 1e-8);
  }
  {
    const auto [r0, r1] = boundary_momentum_residual(shoot(harmonic(), 1.0, vec({0.0}), vec({1.0})));
    CHECK(r0.norm() < 1e-6);
    CHECK(r1.norm() < 1e-6);
  }
  {
    const auto [r0, r1] = boundary_momentum_residual(shoot(quartic(), 0.5, vec({0.0}), vec({0.3})));
    CHECK(r0.norm() < 1e-6);
    CHECK(r1.norm() < 1e-6);
  }
  {
    const auto [r0, r1] =
        boundary_momentum_residual(shoot(magnetic_2d(), 0.7, vec({0.1, -0.2}), vec({0.3, 0.2})));
    CHECK(r0.norm() < 1e-6);
    CHECK(r1.norm() < 1e-6);
  }
}

TEST_CASE("stationary source points") {
  {
    const auto [q0, path] = stationary_source_point(free_particle(), 1.0, vec({0.4}));
    CHECK(std::abs(q0[0] - 0.4) < 1e-14);
  }
  {
    const auto [q0, path] = stationary_source_point(harmonic(), 0.3, vec({1.0}));
    CHECK(std::abs(q0[0] - 1.0 / std::cos(0.3)) < 1e-8);
    CHECK(std::abs(path.v0()[0]) < 1e-14);
  }
  {
    // q1 - q0 = -t B(q0) + O(t^2), hence q0 - q1 - t B(q1) = O(t^2).
    const auto spec = uniform_field(1.0);
    const Vec q1 = vec({0.5, 0.3});
    double prev = 0.0;
    for (double t : {0.2, 0.1, 0.05}) {
      const auto [q0, path] = stationary_source_point(spec, t, q1);
      const double dev = (q0 - q1 - t * spec.B(q1)).norm();
      if (prev > 0) CHECK(std::log2(prev / dev) > 1.8);
      prev = dev;
      CHECK((path.v0() + spec.B(q0)).norm() < 1e-14);
    }
  }
}

TEST_CASE("duration rescaling") {
  // gamma_eps(s) = gamma(eps s) solves the equation with B scaled by eps and
  // C scaled by eps^2, on [0, 1].
  const auto spec = magnetic_2d();
  const PhaseState s0{vec({0.2, -0.1}), vec({0.5, 0.3})};
  for (double eps : {0.1, 0.01}) {
    auto j = spec.to_json();
    for (auto& term : j["C"]) term["c"] = term["c"].get<double>() * eps * eps;
    for (auto& comp : j["B"])
      for (auto& term : comp) term["c"] = term["c"].get<double>() * eps;
    const auto scaled = PotentialSpec::from_json(j);
    const auto slow = flow(scaled, {s0.q, eps * s0.v}, 1.0);
    const auto fast = flow(spec, s0, eps);
    for (double s : {0.25, 0.5, 1.0}) {
      CHECK((slow.at(s).q - fast.at(eps * s).q).norm() < 1e-10);
      CHECK((slow.at(s).v - eps * fast.at(eps * s).v).norm() < 1e-10);
    }
  }
}
