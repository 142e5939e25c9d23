// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semiprop/errors.hpp"
#include "semiprop/report.hpp"

namespace semiprop {

namespace {

using nlohmann::json;

struct Args {
  std::string config;
  double t = 1.0;
  std::vector<double> q0, q1, guess;
  int loops = 2;
  std::string format = "json";
  std::uint64_t seed = 1;
  int threads = 0;
  int nodes = 24;
  double tol = 1e-8;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double h = 0.0;
  bool richardson = false;
  std::string suite = "sev";
  std::vector<double> t_list = {0.2, 0.1, 0.05, 0.025};
  double t0 = 0.0, t1 = 0.0;
  std::vector<double> at;
  std::string diagram;
};

PotentialSpec load_system(const std::string& path) {
  if (path.empty()) throw ConfigError("--config", "a system file is required");
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open system file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, e.what());
  }
  return PotentialSpec::from_json(j);
}

Vec point(const std::vector<double>& xs, int n, const std::string& flag) {
  if (static_cast<int>(xs.size()) != n)
    throw ConfigError(flag, "expected " + std::to_string(n) + " comma-separated values, got " +
                                std::to_string(xs.size()));
  return Eigen::Map<const Vec>(xs.data(), n);
}

std::optional<Vec> optional_point(const std::vector<double>& xs, int n, const std::string& flag) {
  if (xs.empty()) return std::nullopt;
  return point(xs, n, flag);
}

void check_settings(const Args& a) {
  if (a.loops < 0 || a.loops > kMaxLoops) throw ConfigError("--loops", "must lie in [0, 4]");
  if (!(a.tol > 0) || !(a.abs_tol > 0) || !(a.rel_tol > 0)) throw ConfigError("--tol", "tolerances must be positive");
  if (a.h < 0) throw ConfigError("--fd-step", "must be non-negative");
  if (a.nodes < 2) throw ConfigError("--nodes", "need at least 2 nodes");
  if (a.format != "json" && a.format != "csv") throw ConfigError("--format", "must be json or csv");
}

SeriesOptions series_options(const Args& a) {
  SeriesOptions o;
  o.shoot.integrator.abs_tol = a.abs_tol;
  o.shoot.integrator.rel_tol = a.rel_tol;
  o.quadrature.nodes = a.nodes;
  o.quadrature.tol = a.tol;
  o.quadrature.seed = a.seed;
  o.threads = a.threads;
  return o;
}

void emit(std::ostream& out, const Args& a, const json& body, const json* table) {
  if (a.format == "csv") {
    if (!table) throw ConfigError("--format", "csv is only available for tabular reports");
    out << to_csv(*table);
    return;
  }
  out << with_schema(body).dump(2) << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Args a;
  CLI::App app{"Semiclassical propagator expansion"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "semiprop 1.0");

  auto add_system = [&](CLI::App* sub) {
    sub->add_option("--config", a.config, "System file (JSON)")->required();
    sub->add_option("--format", a.format, "json or csv");
    sub->add_option("--abs-tol", a.abs_tol, "Integrator absolute tolerance");
    sub->add_option("--rel-tol", a.rel_tol, "Integrator relative tolerance");
    sub->add_option("--threads", a.threads, "Worker cap (default SEMIPROP_THREADS or 1)");
  };
  auto add_probe = [&](CLI::App* sub) {
    add_system(sub);
    sub->add_option("--t", a.t, "Duration");
    sub->add_option("--q0", a.q0, "Start point")->delimiter(',')->required();
    sub->add_option("--q1", a.q1, "End point")->delimiter(',')->required();
    sub->add_option("--guess", a.guess, "Initial velocity guess")->delimiter(',');
  };
  auto add_quadrature = [&](CLI::App* sub) {
    sub->add_option("--nodes", a.nodes, "Gauss-Legendre nodes per dimension");
    sub->add_option("--tol", a.tol, "Quadrature tolerance");
    sub->add_option("--seed", a.seed, "Seed for quasi-Monte Carlo shifts");
  };

  auto* solve = app.add_subcommand("solve", "Solve the boundary-value problem");
  add_probe(solve);
  auto* series = app.add_subcommand("series", "Expand V to a loop order");
  add_probe(series);
  add_quadrature(series);
  series->add_option("--loops", a.loops, "Loop order L (0..4)");
  auto* diagrams = app.add_subcommand("diagrams", "List connected marked diagrams");
  diagrams->add_option("--loops", a.loops, "Largest loop number (0..4)");
  diagrams->add_option("--format", a.format, "json or csv");
  auto* eval = app.add_subcommand("eval", "Evaluate one diagram along a path");
  add_probe(eval);
  add_quadrature(eval);
  eval->add_option("--diagram", a.diagram, "Canonical diagram key")->required();
  auto* kernel = app.add_subcommand("kernel", "Green's function and derivatives at one point");
  add_probe(kernel);
  kernel->add_option("--at", a.at, "s,u")->delimiter(',')->required();
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  add_probe(verify);
  add_quadrature(verify);
  verify->add_option("--loops", a.loops, "Loop order L (0..4)");
  verify->add_option("--suite", a.suite, "sev, hj, short-time or semigroup")
      ->check(CLI::IsMember({"sev", "hj", "short-time", "semigroup"}));
  verify->add_option("--fd-step", a.h, "Finite-difference step (0 = automatic)");
  verify->add_flag("--richardson", a.richardson, "Extrapolate over steps h and h/2");
  verify->add_option("--t-list", a.t_list, "Durations for the short-time suite")->delimiter(',');
  verify->add_option("--t0", a.t0, "First leg for the semigroup suite (default t/2)");
  verify->add_option("--t1", a.t1, "Second leg for the semigroup suite (default t/2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    check_settings(a);
    if (*diagrams) {
      const json rows = diagrams_report(a.loops);
      emit(out, a, {{"loops", a.loops}, {"diagrams", rows}}, &rows);
      return 0;
    }
    const auto spec = load_system(a.config);
    const int n = spec.dimension();
    const Vec q0 = point(a.q0, n, "--q0");
    const Vec q1 = point(a.q1, n, "--q1");
    const auto guess = optional_point(a.guess, n, "--guess");
    if (!(a.t > 0)) throw ConfigError("--t", "duration must be positive");
    const auto opts = series_options(a);

    if (*solve) {
      emit(out, a, solve_report(shoot(spec, a.t, q0, q1, guess, opts.shoot)), nullptr);
      return 0;
    }
    if (*series) {
      if (spec.max_order() < required_order(a.loops))
        throw ConfigError("/max_order", "loop order " + std::to_string(a.loops) + " needs max_order >= " +
                                            std::to_string(required_order(a.loops)));
      const json body = series_report(compute_V(spec, a.t, q0, q1, a.loops, guess, opts));
      emit(out, a, body, &body["diagrams"]);
      return 0;
    }
    if (*eval) {
      MarkedDiagram md;
      try {
        md = diagram_from_key(a.diagram);
      } catch (const std::exception& e) {
        throw ConfigError("--diagram", e.what());
      }
      const auto path = shoot(spec, a.t, q0, q1, guess, opts.shoot);
      const auto kern = green_kernel(path);
      const auto value = evaluate(kern, md, opts.quadrature);
      emit(out, a, eval_report(canonical_key(md), automorphism_order(md), value), nullptr);
      return 0;
    }
    if (*kernel) {
      if (a.at.size() != 2) throw ConfigError("--at", "expected s,u");
      const auto path = shoot(spec, a.t, q0, q1, guess, opts.shoot);
      const auto kern = green_kernel(path);
      for (double x : a.at)
        if (x < 0 || x > a.t) throw ConfigError("--at", "times must lie in [0, t]");
      emit(out, a, kernel_report(kern, a.at[0], a.at[1]), nullptr);
      return 0;
    }
    // verify
    json body;
    bool pass = false;
    if (a.suite == "sev") {
      ResidualOptions ro;
      ro.h = a.h;
      ro.richardson = a.richardson;
      ro.series = opts;
      const auto r = schrodinger_residual(spec, a.t, q0, q1, a.loops, guess, ro);
      body = residual_report(r);
      pass = r.within_budget();
      const json rows = body["orders"];
      emit(out, a, body, &rows);
    } else if (a.suite == "hj") {
      const auto path = shoot(spec, a.t, q0, q1, guess, opts.shoot);
      const auto r = hamilton_jacobi_residual(path, a.h > 0 ? a.h : 1e-4, opts.shoot);
      body = hamilton_jacobi_report(r);
      pass = r.within_budget();
      emit(out, a, body, nullptr);
    } else if (a.suite == "short-time") {
      ShortTimeOptions so;
      so.shoot = opts.shoot;
      so.series = opts;
      so.record_v2 = a.loops >= 2;
      const auto r = short_time_suite(spec, q1, a.t_list, so);
      body = short_time_report(r);
      pass = r.within_budget();
      const json rows = body["rows"];
      emit(out, a, body, &rows);
    } else {
      const double t0 = a.t0 > 0 ? a.t0 : 0.5 * a.t;
      const double t1 = a.t1 > 0 ? a.t1 : a.t - t0;
      if (!(t1 > 0)) throw ConfigError("--t1", "legs must have positive duration");
      const auto r = semigroup_leading_check(spec, t0, t1, q0, q1, guess, opts.shoot);
      body = semigroup_report(r);
      pass = r.within_budget();
      emit(out, a, body, nullptr);
    }
    return pass ? 0 : 1;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const std::out_of_range& e) {
    err << "invalid argument: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace semiprop
