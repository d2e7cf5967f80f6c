/*
 * Copyright 2026 The es-unicycle Authors. All rights reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "esu/cli.hpp"
#include "esu/errors.hpp"
#include "esu/io.hpp"
#include "esu/scenario.hpp"

using namespace esu;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("esu-test-" + name);
  fs::remove_all(p);
  return p;
}

bool one_line_error(const std::string& err) {
  return err.rfind("es-unicycle: error kind=", 0) == 0 && err.find('\n') == err.size() - 1;
}

}  // namespace

TEST_CASE("catalog contains the required scenarios") {
  const auto sm = find_scenario("sim-moving");
  REQUIRE(sm);
  CHECK(sm->config.Omega == 5.0);
  CHECK(sm->config.omega() == 50.0);
  CHECK(sm->config.x0 == Vec2{-1.0, 1.0});
  CHECK(sm->vartheta == 1.0);
  CHECK(sm->kappa == 1.0);
  const auto ef = find_scenario("exp-fixed");
  REQUIRE(ef);
  CHECK(ef->config.omega() == 3.0);
  CHECK(ef->config.Omega == 1.5);
  const auto e8 = find_scenario("exp-eight");
  REQUIRE(e8);
  CHECK(e8->config.omega() == 3.0);
  CHECK(e8->config.Omega == 1.0);
  CHECK_FALSE(find_scenario("missing"));
}

TEST_CASE("overrides") {
  auto sc = *find_scenario("sim-moving");
  apply_override(sc, "steps_per_fast_period=400");
  CHECK(sc.config.steps_per_fast_period == 400);
  apply_override(sc, "x0 = 0.5,-0.25");
  CHECK(sc.config.x0 == Vec2{0.5, -0.25});
  apply_override(sc, "omega=100");
  CHECK(sc.config.k == 20);
  CHECK_THROWS_AS(apply_override(sc, "omega=12"), ParameterError);
  CHECK_THROWS_AS(apply_override(sc, "omega=5"), ParameterError);
  CHECK_THROWS_AS(apply_override(sc, "nope=1"), ParameterError);
  CHECK_THROWS_AS(apply_override(sc, "kappa=abc"), ParameterError);
  CHECK_THROWS_AS(apply_override(sc, "novalue"), ParameterError);
  apply_override(sc, "target=constant:1,2");
  CHECK(sc.path.eval(3.0) == Vec2{1.0, 2.0});
}

TEST_CASE("config file sections") {
  const auto list = parse_scenario_config(
      "# comment\n[slow]\nbase = exp-fixed\nt_end = 20\nlaw = cont2\n\n[fast]\nOmega = 10\n");
  REQUIRE(list.size() == 2);
  CHECK(list[0].name == "slow");
  CHECK(list[0].config.t_end == 20.0);
  CHECK(list[0].default_law == LawKind::Cont2);
  CHECK(list[0].config.Omega == 1.5);
  CHECK(list[1].config.Omega == 10.0);
  CHECK(list[1].config.k == 10);
  CHECK_THROWS_AS(parse_scenario_config("t_end = 3\n"), ParameterError);
  CHECK_THROWS_AS(parse_scenario_config("[a]\nbase = nowhere\n"), ParameterError);
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, 4.909258211123})
    CHECK(parse_double(format_double(v)) == v);
  CHECK_THROWS_AS(parse_double("1.0x"), ParameterError);
  CHECK_THROWS_AS(parse_double(""), ParameterError);
}

TEST_CASE("summary round-trip") {
  Summary s{{"accumulated_sq_error", format_double(4.909258211123261)},
            {"law", "cont2"},
            {"max_abs_u", format_double(1.0 / 7.0)}};
  const auto back = parse_summary(format_summary(s));
  CHECK(back == s);
  CHECK(parse_double(back.at("max_abs_u")) == 1.0 / 7.0);
}

TEST_CASE("csv stride keeps files bounded") {
  CHECK(csv_stride(10) == 1);
  CHECK(csv_stride(kMaxCsvRows) == 1);
  CHECK((1000001 + csv_stride(1000001) - 1) / csv_stride(1000001) <= kMaxCsvRows);
  Trajectory tr;
  for (int i = 0; i < 5; ++i) tr.samples.push_back({double(i), {}, {}, 0, 0, 0, 0});
  const auto csv = trajectory_csv(tr, 2);
  CHECK(csv.rfind("t,x1,x2,gamma1,gamma2,theta,u,J,err\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("cli run writes artifacts and a summary") {
  const auto dir = scratch_dir("run");
  const auto r = invoke({"run", "sim-moving", "--law", "cont1", "--override", "t_end=5", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto run_dir = dir / "sim-moving-cont1";
  const auto csv = read_file(run_dir / "trajectory.csv");
  CHECK(csv.rfind("t,x1,x2,gamma1,gamma2,theta,u,J,err\n", 0) == 0);
  const auto summary = parse_summary(read_file(run_dir / "summary.txt"));
  CHECK(summary.count("accumulated_sq_error") == 1);
  CHECK(summary.count("control_effort") == 1);
  CHECK(summary.at("status") == "ok");
  for (const char* f : {"plot_trajectory.csv", "plot_control.csv", "plot_error.csv"})
    CHECK(fs::exists(run_dir / f));

  // Summary values reproduce the in-memory metrics.
  const auto setup = [] {
    auto sc = *find_scenario("sim-moving");
    apply_override(sc, "t_end=5");
    return sc.setup(LawKind::Cont1);
  }();
  const auto m = compute_metrics(simulate_closed_loop(setup.system()), setup.cost.path());
  CHECK(parse_double(summary.at("accumulated_sq_error")) == m.accumulated_sq_error);
  CHECK(parse_double(summary.at("control_effort")) == m.control_effort);

  // Identical invocation, identical bytes.
  REQUIRE(invoke({"run", "sim-moving", "--law", "cont1", "--override", "t_end=5", "--out", dir.string()}).code == 0);
  CHECK(read_file(run_dir / "trajectory.csv") == csv);
}

TEST_CASE("cli run: refined step endpoint agrees") {
  const auto dir = scratch_dir("refine");
  const std::vector<std::string> base{"run", "sim-moving", "--law", "cont2", "--override", "t_end=5",
                                      "--out", dir.string()};
  REQUIRE(invoke(base).code == 0);
  const auto a = parse_summary(read_file(dir / "sim-moving-cont2" / "summary.txt"));
  auto refined = base;
  refined.insert(refined.end(), {"--override", "steps_per_fast_period=400"});
  REQUIRE(invoke(refined).code == 0);
  const auto b = parse_summary(read_file(dir / "sim-moving-cont2" / "summary.txt"));
  CHECK(std::abs(parse_double(a.at("final_error")) - parse_double(b.at("final_error"))) < 1e-8);
}

TEST_CASE("cli run exp-fixed cont4 stays near the 0.4 input bound") {
  const auto dir = scratch_dir("expfixed");
  REQUIRE(invoke({"run", "exp-fixed", "--law", "cont4", "--out", dir.string()}).code == 0);
  const auto s = parse_summary(read_file(dir / "exp-fixed-cont4" / "summary.txt"));
  CHECK(parse_double(s.at("max_abs_u")) <= 0.41);
}

TEST_CASE("cli error paths") {
  const auto dir = scratch_dir("errors");
  auto r = invoke({"run", "nowhere", "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(one_line_error(r.err));

  r = invoke({"compare", "sim-moving", "cont1", "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(one_line_error(r.err));

  r = invoke({"run", "sim-moving", "--override", "omega=7", "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(one_line_error(r.err));

  r = invoke({"bogus"});
  CHECK(r.code == 2);
  CHECK(one_line_error(r.err));

  r = invoke({"run", "fixed-origin", "--law", "cont1", "--override", "x0=1000,0", "--out", dir.string()});
  CHECK(r.code == 3);
  CHECK(one_line_error(r.err));
  CHECK(fs::exists(dir / "fixed-origin-cont1" / "trajectory.csv"));

  r = invoke({"compare", "fixed-origin", "cont1", "cont2", "--override", "x0=1000,0", "--out", dir.string()});
  CHECK(r.code == 4);
  CHECK(r.out.find("failed") != std::string::npos);
  CHECK(fs::exists(dir / "compare-fixed-origin.csv"));

  r = invoke({"study", "volterra", "fixed-origin", "--law", "cont4", "--override", "x0=0,0", "--out", dir.string()});
  CHECK(r.code == 5);
  CHECK(one_line_error(r.err));
}

TEST_CASE("cli compare sorts by accumulated error") {
  const auto dir = scratch_dir("compare");
  const auto r = invoke({"compare", "exp-fixed", "cont1", "cont2", "cont4", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto csv = read_file(dir / "compare-exp-fixed.csv");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  double prev = -1.0;
  int rows = 0;
  while (std::getline(in, line)) {
    const auto c1 = line.find(','), c2 = line.find(',', c1 + 1), c3 = line.find(',', c2 + 1);
    const double acc = parse_double(line.substr(c2 + 1, c3 - c2 - 1));
    CHECK(acc >= prev);
    prev = acc;
    ++rows;
  }
  CHECK(rows == 3);
  CHECK(csv.find("cont1,ok") > csv.find("cont2,ok"));
}

TEST_CASE("cli study commands") {
  const auto dir = scratch_dir("study");
  auto r = invoke({"study", "volterra", "--omega", "50,100,200,400,800", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto s = parse_summary(read_file(dir / "study-volterra-fixed-origin.txt"));
  const double slope = parse_double(s.at("slope"));
  CHECK(slope >= -2.0);
  CHECK(slope <= -1.2);

  r = invoke({"study", "omega", "sim-moving", "--k", "10,20", "--override", "t_end=10", "--serial",
           "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(parse_summary(read_file(dir / "study-omega-sim-moving.txt")).count("sup_distance.k20") == 1);

  r = invoke({"study", "probe", "sim-moving", "--eps", "0.5", "--delta", "0.5", "--omega", "50,100",
           "--horizon", "20", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto p = parse_summary(read_file(dir / "study-probe-sim-moving.txt"));
  CHECK(p.count("omega0") == 1);
  CHECK(p.at("scope").find("grid") != std::string::npos);
}

TEST_CASE("cli honours ES_UNICYCLE_OUT and --config") {
  const auto dir = scratch_dir("env");
  const auto cfg = dir / "custom.ini";
  fs::create_directories(dir);
  write_file_atomic(cfg, "[mine]\nbase = fixed-origin\nt_end = 1\nlaw = cont3\n");
  ::setenv("ES_UNICYCLE_OUT", (dir / "out").string().c_str(), 1);
  const auto r = invoke({"run", "mine", "--config", cfg.string()});
  ::unsetenv("ES_UNICYCLE_OUT");
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "out" / "mine-cont3" / "summary.txt"));
}

TEST_CASE("cli list and help") {
  auto r = invoke({"list"});
  CHECK(r.code == 0);
  for (const char* n : {"sim-moving", "exp-fixed", "exp-eight"}) CHECK(r.out.find(n) != std::string::npos);
  r = invoke({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("run") != std::string::npos);
}

TEST_CASE("cli run with a tabulated target and a custom law") {
  const auto dir = scratch_dir("tabulated");
  fs::create_directories(dir);
  const auto table = dir / "target.csv";
  write_file_atomic(table, "# t,x1,x2\n0,0,0\n5,0.5,0\n20,0.5,1\n");
  auto r = invoke({"run", "fixed-origin", "--law", "cont2", "--override", "target=tabulated:" + table.string(),
                   "--override", "t_end=20", "--out", dir.string()});
  REQUIRE(r.code == 0);
  auto s = parse_summary(read_file(dir / "fixed-origin-cont2" / "summary.txt"));
  CHECK(parse_double(s.at("nu")) == doctest::Approx(0.11));

  r = invoke({"run", "fixed-origin", "--law", "custom", "--override", "f1=sin", "--override", "z_ref=1.5",
              "--override", "c0=-0.0709", "--override", "t_end=2", "--out", dir.string()});
  REQUIRE(r.code == 0);
  s = parse_summary(read_file(dir / "fixed-origin-custom" / "summary.txt"));
  CHECK(parse_double(s.at("final_error")) < 1.0);

  // Past the window of the table.
  r = invoke({"run", "fixed-origin", "--override", "target=tabulated:" + table.string(), "--override",
              "t_end=30", "--out", dir.string()});
  CHECK(r.code != 0);
  CHECK(one_line_error(r.err));
}
