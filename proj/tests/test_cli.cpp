// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "semiprop");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = semiprop::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string write_config(const std::string& name, const std::string& text) {
  const auto dir = fs::temp_directory_path() / "semiprop_cli_test";
  fs::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << text;
  return path.string();
}

const std::string kFree = R"({"n": 2, "C": []})";
const std::string kHarmonic = R"({"n": 1, "C": [{"c": 0.5, "e": [2]}]})";
const std::string kQuartic = R"({"n": 1, "C": [{"c": 1.0, "e": [4]}]})";

}  // namespace

TEST_CASE("diagrams subcommand") {
  const auto r = run({"diagrams", "--loops", "2"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["schema"] == "semiprop/1");
  int unmarked = 0;
  for (const auto& row : j["diagrams"])
    if (row["marks"] == 0) ++unmarked;
  CHECK(unmarked == 3);
  CHECK(j["diagrams"].size() == 12);
  const auto csv = run({"diagrams", "--loops", "2", "--format", "csv"});
  REQUIRE(csv.code == 0);
  CHECK(csv.out.find("key") < csv.out.find('\n'));
  CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 13);
}

TEST_CASE("series on a free particle") {
  const auto cfg = write_config("free.json", kFree);
  const double t = 2.0;
  const auto r = run({"series", "--config", cfg, "--t", "2", "--q0", "0,0", "--q1", "1,1", "--loops", "3"});
  REQUIRE(r.code == 0);
  const auto v = json::parse(r.out)["v"];
  REQUIRE(v.size() == 4);
  CHECK(v[0].get<double>() == doctest::Approx(-2.0 / (2 * t)));
  CHECK(v[1].get<double>() == doctest::Approx(-std::log(t)));
  CHECK(v[2].get<double>() == 0.0);
  CHECK(v[3].get<double>() == 0.0);
}

TEST_CASE("configuration errors exit with code 2") {
  const auto bad = write_config("bad.json", R"({"n": 1, "C": [{"c": 1.0, "e": [2, 1]}]})");
  const auto r = run({"series", "--config", bad, "--t", "1", "--q0", "0", "--q1", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("/C/0/e") != std::string::npos);
  const auto cfg = write_config("harmonic.json", kHarmonic);
  CHECK(run({"series", "--config", cfg, "--t", "1", "--q0", "0,1", "--q1", "1"}).code == 2);
  CHECK(run({"series", "--config", cfg, "--t", "1", "--q0", "0", "--q1", "1", "--loops", "7"}).code == 2);
  CHECK(run({"series", "--config", cfg, "--t", "-1", "--q0", "0", "--q1", "1"}).code == 2);
  CHECK(run({"eval", "--config", cfg, "--q0", "0", "--q1", "1", "--diagram", "bogus"}).code == 2);
  CHECK(run({"solve", "--config", "/nonexistent.json", "--q0", "0", "--q1", "1"}).code == 2);
  CHECK(run({"nosuchcommand"}).code == 2);
  CHECK(run({"diagrams", "--format", "csv", "--loops", "9"}).code == 2);
  CHECK(run({"solve", "--config", cfg, "--q0", "0", "--q1", "1", "--format", "csv"}).code == 2);
}

TEST_CASE("solver failures exit with code 3") {
  const auto cfg = write_config("harmonic.json", kHarmonic);
  const auto r = run({"series", "--config", cfg, "--t", "3.141592653589793", "--q0", "0", "--q1", "1"});
  CHECK(r.code == 3);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("solve, kernel and eval reports") {
  const auto cfg = write_config("harmonic.json", kHarmonic);
  const auto s = run({"solve", "--config", cfg, "--t", "1", "--q0", "0", "--q1", "1"});
  REQUIRE(s.code == 0);
  const auto sj = json::parse(s.out);
  CHECK(sj["schema"] == "semiprop/1");
  CHECK(sj["v0"][0].get<double>() == doctest::Approx(1.0 / std::sin(1.0)));
  const auto k = run({"kernel", "--config", cfg, "--t", "1", "--q0", "0", "--q1", "1", "--at", "0.25,0.75"});
  REQUIRE(k.code == 0);
  const double expect = std::sin(0.25) * std::sin(0.25) / std::sin(1.0);
  CHECK(json::parse(k.out)["G"][0][0].get<double>() == doctest::Approx(expect));
  CHECK(run({"kernel", "--config", cfg, "--t", "1", "--q0", "0", "--q1", "1", "--at", "0.5,2"}).code == 2);
  const auto q = write_config("quartic.json", kQuartic);
  const auto e = run({"eval", "--config", q, "--t", "1", "--q0", "0", "--q1", "0", "--diagram", "1|0-0,0-0"});
  REQUIRE(e.code == 0);
  const auto ej = json::parse(e.out);
  CHECK(ej["value"].get<double>() == doctest::Approx(0.8));
  CHECK(ej["aut"] == 8);
}

TEST_CASE("verify suites and budgets") {
  const auto q = write_config("quartic.json", kQuartic);
  const std::vector<std::string> base{"verify", "--config", q, "--t", "0.8", "--q0", "0", "--q1", "0.4"};
  auto with = [&](std::vector<std::string> extra) {
    auto a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return run(a);
  };
  const auto ok = with({"--loops", "1"});
  REQUIRE(ok.code == 0);
  const auto j = json::parse(ok.out);
  CHECK(j["suite"] == "sev");
  CHECK(j["pass"] == true);
  // A coarse stencil blows the budget.
  CHECK(with({"--loops", "1", "--fd-step", "0.2"}).code == 1);
  CHECK(with({"--suite", "hj"}).code == 0);
  CHECK(with({"--suite", "semigroup"}).code == 0);
  const auto csv = with({"--loops", "1", "--format", "csv"});
  REQUIRE(csv.code == 0);
  CHECK(csv.out.find("residual") < csv.out.find('\n'));
  CHECK(with({"--suite", "nope"}).code == 2);
}

TEST_CASE("identical runs produce identical bytes") {
  const auto q = write_config("quartic.json", kQuartic);
  const std::vector<std::string> args{"verify", "--config", q, "--t", "0.8", "--q0", "0", "--q1", "0.4", "--loops",
                                      "1", "--seed", "7"};
  const auto a = run(args);
  const auto b = run(args);
  CHECK(a.out == b.out);
  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "3"});
  CHECK(run(threaded).out == a.out);
}

TEST_CASE("installed binary") {
  const auto out = (fs::temp_directory_path() / "semiprop_cli_test" / "bin_out.json").string();
  const std::string cmd = std::string(SEMIPROP_BIN) + " diagrams --loops 2 > " + out;
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
  std::ifstream in(out);
  CHECK(json::parse(in)["schema"] == "semiprop/1");
  const int bad = std::system((std::string(SEMIPROP_BIN) + " series --config /nonexistent 2>/dev/null").c_str());
  CHECK(WEXITSTATUS(bad) == 2);
}
