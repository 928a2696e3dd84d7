// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "feast/errors.hpp"
#include "feast/linsolve.hpp"
#include "support.hpp"

using feast::Complex;
using feast::DenseMatrix;

namespace {

feast::SparseHermitianPencil zero_pencil(std::size_t n) {
  feast::SparseHermitianPencil p;
  p.a = feast::SparseMatrixCsr::from_triplets(n, {});
  return p;
}

feast::LinSolveConfig gmres_cfg(double tol) {
  feast::LinSolveConfig cfg;
  cfg.backend = feast::LinSolveBackend::gmres;
  cfg.tol = tol;
  return cfg;
}

double rel_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("identity system") {
  const auto p = zero_pencil(7);
  const feast::ShiftedOperator op(p, 1.0);
  std::vector<Complex> rhs{1, Complex(0, 2), 3, -4, 5, 0.5, Complex(1, 1)};
  const auto res = feast::gmres_solve(op, rhs, gmres_cfg(1e-12));
  CHECK(res.report.iterations == 1);
  CHECK(res.report.converged);
  CHECK(rel_diff(res.x, rhs) < 1e-15);

  DenseMatrix block(7, 1);
  for (std::size_t i = 0; i < 7; ++i) block(i, 0) = rhs[i];
  CHECK(testsupport::max_abs_diff(feast::direct_dense_solve(op, block), block) < 1e-15);
}

TEST_CASE("GMRES matches a dense elimination oracle") {
  feast::SparseHermitianPencil p;
  p.a = testsupport::random_sparse_hermitian(50, 8, 21);
  const Complex z(0.3, 0.4);
  const feast::ShiftedOperator op(p, z);
  feast::Rng rng(22);
  std::vector<Complex> rhs(50);
  for (auto& v : rhs) v = Complex(rng.normal(), rng.normal());
  const auto res = feast::gmres_solve(op, rhs, gmres_cfg(1e-12));
  CHECK(res.report.converged);
  DenseMatrix m = p.a.to_dense();
  for (std::size_t j = 0; j < 50; ++j)
    for (std::size_t i = 0; i < 50; ++i) m(i, j) = (i == j ? z : 0.0) - m(i, j);
  const auto oracle = testsupport::gauss_solve(m, rhs);
  CHECK(rel_diff(res.x, oracle) <= 1e-10);
}

TEST_CASE("direct and GMRES backends agree") {
  feast::SparseHermitianPencil p;
  p.a = testsupport::random_sparse_hermitian(60, 10, 23);
  p.b = feast::SparseMatrixCsr::diagonal(std::vector<double>(60, 2.0));
  const feast::ShiftedOperator op(p, Complex(-0.2, 0.7));
  const DenseMatrix rhs = testsupport::random_matrix(60, 3, 24);
  const auto direct = feast::direct_dense_solve(op, rhs);
  const auto iter = feast::solve_block(op, rhs, gmres_cfg(1e-13));
  for (std::size_t j = 0; j < 3; ++j) CHECK(rel_diff(iter.x.col(j), direct.col(j)) <= 1e-10);
  // direct residual per column
  for (std::size_t j = 0; j < 3; ++j) {
    const auto back = op.apply(direct.col(j));
    CHECK(rel_diff(back, rhs.col(j)) <= 1e-12);
  }
}

TEST_CASE("exact pole is singular") {
  feast::SparseHermitianPencil p;
  p.a = feast::SparseMatrixCsr::diagonal(std::vector<double>{1, 2, 3, 4});
  const feast::ShiftedOperator op(p, 3.0);
  CHECK_THROWS_AS(feast::direct_dense_solve(op, DenseMatrix::identity(4)), feast::SingularSystem);
}

TEST_CASE("dense cap and config validation") {
  feast::SparseHermitianPencil p;
  p.a = feast::SparseMatrixCsr::identity(10);
  CHECK_THROWS_AS(feast::direct_dense_solve(feast::ShiftedOperator(p, Complex(0, 1)), DenseMatrix(10, 1), 5),
                  feast::InvalidParams);
  feast::LinSolveConfig cfg;
  cfg.tol = 1.0;
  CHECK_THROWS_AS(cfg.validate(), feast::InvalidParams);
  cfg.tol = 1e-8;
  cfg.restart = 0;
  CHECK_THROWS_AS(cfg.validate(), feast::InvalidParams);
}

TEST_CASE("solve_block contracts") {
  feast::SparseHermitianPencil p;
  p.a = testsupport::random_sparse_hermitian(30, 6, 25);
  const feast::ShiftedOperator op(p, Complex(0.1, 0.5));

  const auto zero = feast::solve_block(op, DenseMatrix(30, 2), gmres_cfg(1e-10));
  CHECK(testsupport::max_abs(zero.x) == 0.0);
  CHECK(zero.report.total_iterations() == 0);
  CHECK(zero.report.all_converged());

  const DenseMatrix rhs = testsupport::random_matrix(30, 3, 26);
  for (auto backend : {feast::LinSolveBackend::gmres, feast::LinSolveBackend::direct_dense}) {
    auto cfg = gmres_cfg(1e-11);
    cfg.backend = backend;
    const auto block = feast::solve_block(op, rhs, cfg);
    for (std::size_t j = 0; j < 3; ++j) {
      DenseMatrix one(30, 1);
      std::ranges::copy(rhs.col(j), one.col(0).begin());
      const auto single = feast::solve_block(op, one, cfg);
      for (std::size_t i = 0; i < 30; ++i) CHECK(block.x(i, j) == single.x(i, 0));
    }
  }
}

TEST_CASE("mixed convergence flags the hard column only") {
  // diagonal pencil; column 0 excites only a well-separated eigenvalue,
  // column 1 spreads over the whole spectrum next to a near-pole shift
  std::vector<double> d(80);
  for (std::size_t i = 0; i < 80; ++i) d[i] = 1.0 + static_cast<double>(i) * 0.05;
  feast::SparseHermitianPencil p;
  p.a = feast::SparseMatrixCsr::diagonal(d);
  const feast::ShiftedOperator op(p, Complex(d[40], 1e-9));
  DenseMatrix rhs(80, 2);
  rhs(0, 0) = 1.0;
  for (std::size_t i = 0; i < 80; ++i) rhs(i, 1) = 1.0;
  auto cfg = gmres_cfg(1e-12);
  cfg.max_iters = 20;
  cfg.restart = 10;
  const auto res = feast::solve_block(op, rhs, cfg);
  CHECK(res.report.columns[0].converged);
  CHECK_FALSE(res.report.columns[1].converged);
  CHECK(res.report.columns[1].iterations == 20);
  CHECK_FALSE(res.report.all_converged());
}

TEST_CASE("solutions are bit-reproducible") {
  feast::SparseHermitianPencil p;
  p.a = testsupport::random_sparse_hermitian(40, 6, 27);
  const feast::ShiftedOperator op(p, Complex(0.2, 0.3));
  const DenseMatrix rhs = testsupport::random_matrix(40, 4, 28);
  const auto a = feast::solve_block(op, rhs, gmres_cfg(1e-9));
  const auto b = feast::solve_block(op, rhs, gmres_cfg(1e-9));
  CHECK(a.x == b.x);
}

TEST_CASE("cached factorization solves the adjoint system") {
  feast::SparseHermitianPencil p;
  p.a = testsupport::random_sparse_hermitian(25, 5, 29);
  const Complex z(0.4, 0.2);
  feast::LinSolveConfig cfg;
  feast::ShiftedSolver solver(feast::ShiftedOperator(p, z), cfg);
  const DenseMatrix rhs = testsupport::random_matrix(25, 2, 30);
  const auto fwd = solver.solve(rhs);
  const auto adj = solver.solve(rhs, true);
  const auto fwd_ref = feast::direct_dense_solve(feast::ShiftedOperator(p, z), rhs);
  const auto adj_ref = feast::direct_dense_solve(feast::ShiftedOperator(p, std::conj(z)), rhs);
  CHECK(testsupport::max_abs_diff(fwd.x, fwd_ref) < 1e-12 * testsupport::max_abs(fwd_ref));
  CHECK(testsupport::max_abs_diff(adj.x, adj_ref) < 1e-12 * testsupport::max_abs(adj_ref));
}

TEST_CASE("near-pole shifts still converge") {
  std::vector<double> d(100);
  for (std::size_t i = 0; i < 100; ++i) d[i] = static_cast<double>(i + 1) / 100.0;
  feast::SparseHermitianPencil p;
  p.a = feast::SparseMatrixCsr::diagonal(d);
  std::vector<Complex> rhs(100, 1.0);
  auto cfg = gmres_cfg(1e-10);
  cfg.restart = 100;
  for (double delta : {1e-1, 1e-3, 1e-5, 1e-8}) {
    const auto res = feast::gmres_solve(feast::ShiftedOperator(p, Complex(d[50], delta)), rhs, cfg);
    MESSAGE("delta ", delta, ": ", res.report.iterations, " iterations");
    CHECK(res.report.converged);
  }
}
