// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "feast/errors.hpp"
#include "feast/experiments.hpp"

namespace ex = feast::experiments;

namespace {

ex::Config parse(const std::string& text) {
  std::istringstream in(text);
  return ex::Config::parse(in);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("config parsing") {
  auto cfg = parse("# comment\nseed = 7\n  m_tilde = 3:5, 9 # trailing\nlin_tols=1e-6,1e-8\nflag = yes\n");
  CHECK(cfg.seed() == 7);
  CHECK(cfg.counts("m_tilde", {}) == std::vector<std::size_t>{3, 4, 5, 9});
  CHECK(cfg.reals("lin_tols", {}) == std::vector<double>{1e-6, 1e-8});
  CHECK(cfg.flag("flag", false));
  CHECK(cfg.real("absent", 2.5) == 2.5);
  CHECK_NOTHROW(cfg.reject_unused());
  std::ostringstream echo;
  cfg.echo(echo);
  CHECK(echo.str().find("absent=2.5\n") != std::string::npos);
  CHECK(echo.str().find("m_tilde=3,4,5,9\n") != std::string::npos);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse("seed 7\n"), feast::ParseError);
  CHECK_THROWS_AS(parse("a=1\na=2\n"), feast::ParseError);
  CHECK_THROWS_AS(parse("=1\n"), feast::ParseError);
  auto none = parse("");
  CHECK_THROWS_AS(none.seed(), feast::InvalidParams);
  auto neg = parse("seed=-3\n");
  CHECK_THROWS_AS(neg.seed(), feast::InvalidParams);
  auto bad = parse("x=abc\nm=5:2\nk=1.5\n");
  CHECK_THROWS_AS(bad.real("x", 0.0), feast::InvalidParams);
  CHECK_THROWS_AS(bad.counts("m", {}), feast::InvalidParams);
  CHECK_THROWS_AS(bad.count("k", 0), feast::InvalidParams);
  auto extra = parse("seed=1\ntypo_key=3\n");
  (void)extra.seed();
  CHECK_THROWS_WITH_AS(extra.reject_unused(), doctest::Contains("typo_key"), feast::InvalidParams);
}

TEST_CASE("CSV formatting") {
  CHECK(ex::format_real(0.1) == "1.0000000000000001e-01");
  CHECK(ex::format_real(-2.0) == "-2.0000000000000000e+00");
  CHECK(ex::format_real(std::numeric_limits<double>::quiet_NaN()) == "nan");
  ex::CsvReport r{"t", {"a", "b", "c"}, {}};
  r.add({std::int64_t{3}, 0.5, std::string("x")});
  CHECK_THROWS_AS(r.add({std::int64_t{1}}), feast::DimensionMismatch);
  std::ostringstream s;
  r.write(s);
  CHECK(s.str() == "a,b,c\n3,5.0000000000000000e-01,x\n");
}

TEST_CASE("interval placement") {
  const std::vector<double> spec{1, 2, 3, 4, 10};
  auto [lo, hi] = ex::place_interval({ex::IntervalChoice::Rule::lowest, 0, 0, 3}, spec);
  CHECK(hi == doctest::Approx(3.5));
  CHECK(lo == doctest::Approx(1.0 - 0.1 * 3.0));
  auto [lo2, hi2] = ex::place_interval({ex::IntervalChoice::Rule::highest, 0, 0, 1}, spec);
  CHECK(lo2 == doctest::Approx(7.0));
  CHECK(hi2 > 10.0);
  CHECK_THROWS_AS(ex::place_interval({ex::IntervalChoice::Rule::lowest, 0, 0, 5}, spec), feast::InvalidParams);
}

TEST_CASE("experiment kinds") {
  for (auto k : {ex::ExperimentKind::subspace_sweep, ex::ExperimentKind::deflated_start,
                 ex::ExperimentKind::stopping_demo, ex::ExperimentKind::linsolve_tol_sweep,
                 ex::ExperimentKind::multi_interval_orth})
    CHECK(ex::parse_kind(ex::to_string(k)) == k);
  CHECK_THROWS_AS(ex::parse_kind("nonsense"), feast::InvalidParams);
}

TEST_CASE("unknown keys stop a run before any output") {
  const auto dir = std::filesystem::temp_directory_path() / "feast_unknown_key";
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(ex::run_experiment(ex::ExperimentKind::subspace_sweep, parse("seed=1\nm_tilda=4\n"), dir),
                  feast::InvalidParams);
  CHECK_FALSE(std::filesystem::exists(dir / "subspace_sweep.csv"));
}

TEST_CASE("small end-to-end sweep is reproducible") {
  const std::string text =
      "seed = 3\ngenerator = planted_gap\nn = 60\nlow_count = 8\ninterval_lo = 0\ninterval_hi = 1.5\n"
      "m_tilde = 6:10\nmax_iters = 8\n";
  const auto base = std::filesystem::temp_directory_path();
  const auto d1 = base / "feast_e2e_1", d2 = base / "feast_e2e_2";
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
  ex::run_experiment(ex::ExperimentKind::subspace_sweep, parse(text), d1, {2, true});
  ex::run_experiment(ex::ExperimentKind::subspace_sweep, parse(text), d2, {1, false});
  const auto a = slurp(d1 / "subspace_sweep.csv");
  CHECK(a == slurp(d2 / "subspace_sweep.csv"));
  CHECK(slurp(d1 / "subspace_angles.csv") == slurp(d2 / "subspace_angles.csv"));
  CHECK(std::filesystem::exists(d1 / "subspace_sweep.gp"));
  CHECK_FALSE(std::filesystem::exists(d2 / "subspace_sweep.gp"));
  const auto echo = slurp(d1 / "resolved_config.txt");
  CHECK(echo.find("m_tilde=6,7,8,9,10") != std::string::npos);
  CHECK(echo.find("quad_nodes=8") != std::string::npos);
  // header plus one row per M~
  CHECK(std::ranges::count(a, '\n') == 6);

  const auto sweep = ex::run_subspace_sweep([&] {
    auto cfg = parse(text);
    return ex::resolve_subspace_sweep(cfg);
  }());
  CHECK(sweep.eigencount == 8);
  for (const auto& pt : sweep.points) {
    if (pt.m_tilde < 8) CHECK(pt.status == feast::FeastStatus::MaxIters);
    if (pt.m_tilde >= 9) CHECK(pt.status == feast::FeastStatus::Converged);
  }
}
