// SPDX-License-Identifier: Apache-2.0
// feastx: command-line front end for the solver and the experiment drivers.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "feast/errors.hpp"
#include "feast/experiments.hpp"
#include "feast/feast.hpp"
#include "feast/kernels.hpp"
#include "feast/rng.hpp"
#include "feast/sparse.hpp"

namespace fx = feast::experiments;

namespace {

struct SolveArgs {
  std::string matrix, mass, out;
  std::vector<double> interval;
  std::size_t m_estimate = 0;
  std::size_t quad_nodes = 8;
  std::string criterion = "residual";
  double eps = std::numeric_limits<double>::epsilon();
  double lin_tol = 1e-12;
  std::string backend = "direct";
  std::uint64_t seed = 1;
  std::size_t max_iters = 20;
};

void write_table(const std::filesystem::path& dir, const fx::CsvReport& t) {
  std::ofstream out(dir / (t.name + ".csv"));
  if (!out) throw feast::InvalidParams("cannot write " + (dir / (t.name + ".csv")).string());
  t.write(out);
}

int run_solve(const SolveArgs& a) {
  feast::SparseHermitianPencil pencil;
  pencil.a = feast::read_matrix_market(a.matrix);
  if (!a.mass.empty()) pencil.b = feast::read_matrix_market(a.mass);
  pencil.validate();

  feast::FeastConfig cfg;
  cfg.interval = {a.interval.at(0), a.interval.at(1), a.m_estimate};
  cfg.quadrature_m = a.quad_nodes;
  cfg.criterion = a.criterion == "trace" ? feast::Criterion::trace : feast::Criterion::residual;
  cfg.eps = a.eps;
  cfg.lin.tol = a.lin_tol;
  cfg.lin.backend = a.backend == "gmres" ? feast::LinSolveBackend::gmres : feast::LinSolveBackend::direct_dense;
  cfg.max_feast_iters = a.max_iters;
  cfg.seed = feast::derive_seed(a.seed, 1);
  cfg.validate();

  const auto result = feast::feast_solve(
      pencil, cfg, feast::StartingBasis::random(pencil.n(), a.m_estimate, feast::derive_seed(a.seed, 0)));

  const std::filesystem::path dir = a.out;
  std::filesystem::create_directories(dir);
  fx::CsvReport pairs{"eigenpairs", {"index", "value", "residual", "converged"}, {}};
  std::int64_t idx = 0;
  for (std::size_t j = 0; j < result.ritz.size(); ++j)
    if (result.ritz.in_interval[j])
      pairs.add({idx++, result.ritz.values[j], result.ritz.residuals[j], std::int64_t{result.ritz.converged[j]}});
  write_table(dir, pairs);

  fx::CsvReport iters{"iterations",
                      {"iteration", "in_interval", "trace", "trace_change", "res_min", "res_max", "bound",
                       "effective_rank", "angle_to_prev_deg", "linear_iterations"},
                      {}};
  for (const auto& rec : result.trace)
    iters.add({static_cast<std::int64_t>(rec.iteration), static_cast<std::int64_t>(rec.in_interval), rec.trace,
               rec.trace_change, rec.residual_min, rec.residual_max, rec.residual_bound,
               static_cast<std::int64_t>(rec.effective_rank), rec.angle_to_prev_deg,
               static_cast<std::int64_t>(rec.linear_iterations)});
  write_table(dir, iters);

  const auto x = result.ritz.interval_vectors();
  std::printf("status %s after %zu iterations, %zu eigenpairs in [%g, %g], orthogonality %.3e\n",
              feast::to_string(result.status), result.trace.size(), x.cols(), a.interval[0], a.interval[1],
              x.cols() > 0 ? feast::b_orthogonality(x, pencil) : 0.0);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FEAST contour-integration eigensolver"};
  app.require_subcommand(1);
  app.fallthrough();
  int jobs = 1;
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  SolveArgs s;
  auto* solve = app.add_subcommand("solve", "solve A x = lambda B x on an interval");
  solve->add_option("--matrix", s.matrix, "Matrix Market file for A")->required()->check(CLI::ExistingFile);
  solve->add_option("--mass", s.mass, "Matrix Market file for B (default identity)")->check(CLI::ExistingFile);
  solve->add_option("--interval", s.interval, "LO HI")->required()->expected(2);
  solve->add_option("--m-estimate", s.m_estimate, "subspace size M~")->required()->check(CLI::PositiveNumber);
  solve->add_option("--quad-nodes", s.quad_nodes, "Gauss-Legendre nodes on the half contour")->capture_default_str();
  solve->add_option("--criterion", s.criterion)->check(CLI::IsMember({"residual", "trace"}))->capture_default_str();
  solve->add_option("--eps", s.eps, "residual criterion epsilon");
  solve->add_option("--lin-tol", s.lin_tol, "inner solver relative tolerance")->capture_default_str();
  solve->add_option("--backend", s.backend)->check(CLI::IsMember({"direct", "gmres"}))->capture_default_str();
  solve->add_option("--seed", s.seed)->capture_default_str();
  solve->add_option("--max-iters", s.max_iters)->capture_default_str();
  solve->add_option("--out", s.out, "output directory")->required();

  std::string kind, config_file, out_dir;
  bool gnuplot = false;
  auto* exp = app.add_subcommand("experiment", "run an experiment driver");
  exp->add_option("kind", kind)
      ->required()
      ->check(CLI::IsMember(
          {"subspace_sweep", "deflated_start", "stopping_demo", "linsolve_tol_sweep", "multi_interval_orth"}));
  exp->add_option("--config", config_file, "key=value file")->required()->check(CLI::ExistingFile);
  exp->add_option("--out", out_dir, "output directory")->required();
  exp->add_flag("--gnuplot", gnuplot, "also write a gnuplot script");

  CLI11_PARSE(app, argc, argv);

  try {
    feast::kernels::set_threads(jobs);
    if (*solve) return run_solve(s);
    fx::run_experiment(fx::parse_kind(kind), fx::Config::load(config_file), out_dir, {jobs, gnuplot});
    std::printf("wrote %s\n", out_dir.c_str());
    return 0;
  } catch (const feast::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
