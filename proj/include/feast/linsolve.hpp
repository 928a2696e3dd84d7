// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "feast/dense.hpp"
#include "feast/sparse.hpp"

namespace feast {

/// x -> (zB - A)x for a fixed shift z. Holds a reference to the pencil,
/// which must outlive the operator.
class ShiftedOperator {
 public:
  ShiftedOperator(const SparseHermitianPencil& pencil, Complex shift)
      : pencil_(&pencil), shift_(shift) {}

  std::size_t n() const noexcept { return pencil_->n(); }
  Complex shift() const noexcept { return shift_; }
  const SparseHermitianPencil& pencil() const noexcept { return *pencil_; }

  /// y = (zB - A)x. Throws DimensionMismatch.
  void apply(std::span<const Complex> x, std::span<Complex> y) const;
  std::vector<Complex> apply(std::span<const Complex> x) const;

  /// The same operator at the conjugate shift, i.e. the adjoint.
  ShiftedOperator conjugate() const { return {*pencil_, std::conj(shift_)}; }

 private:
  const SparseHermitianPencil* pencil_;
  Complex shift_;
};

enum class LinSolveBackend { gmres, direct_dense };

struct LinSolveConfig {
  double tol = 1e-12;
  /// 0 selects 10 n.
  std::size_t max_iters = 0;
  std::size_t restart = 50;
  LinSolveBackend backend = LinSolveBackend::direct_dense;
  std::size_t dense_cap = 4000;
  /// Keep GMRES's per-iteration residual estimate (relative to r0).
  bool record_history = false;

  /// Throws InvalidParams unless 0 < tol < 1 and restart >= 1.
  void validate() const;
};

struct ColumnReport {
  std::size_t iterations = 0;
  /// ||(zB - A)v - rhs|| / ||r0||, recomputed from the returned v.
  double residual = 0.0;
  bool converged = false;
  std::vector<double> history;
};

struct LinSolveReport {
  std::vector<ColumnReport> columns;

  bool all_converged() const noexcept;
  std::size_t total_iterations() const noexcept;
  double max_residual() const noexcept;
};

struct GmresResult {
  std::vector<Complex> x;
  ColumnReport report;
};

/// Restarted GMRES (modified Gram-Schmidt Arnoldi, Givens least squares),
/// stopping on ||rhs - op x|| <= tol ||rhs - op x0||. An empty x0 means zero.
/// Hitting max_iters leaves converged = false. Throws Breakdown when the
/// Krylov space becomes invariant without reaching the tolerance.
GmresResult gmres_solve(const ShiftedOperator& op, std::span<const Complex> rhs,
                        const LinSolveConfig& cfg, std::span<const Complex> x0 = {});

/// Partial-pivoting LU of zB - A in band storage (bandwidth taken from the
/// union pattern of A and B; for full patterns this is ordinary dense LU).
/// Factor once, then solve with (zB - A) or its adjoint (conj(z)B - A).
class ShiftedFactorization {
 public:
  /// Throws InvalidParams when n exceeds dense_cap, SingularSystem when a
  /// pivot falls below 1e-300.
  explicit ShiftedFactorization(const ShiftedOperator& op, std::size_t dense_cap = 4000);

  std::size_t n() const noexcept { return n_; }
  void solve_in_place(std::span<Complex> b) const;
  void solve_adjoint_in_place(std::span<Complex> b) const;

 private:
  Complex& at(std::size_t i, std::size_t j) { return ab_[(kl_ + ku_ + i - j) + j * ldab_]; }
  const Complex& at(std::size_t i, std::size_t j) const { return ab_[(kl_ + ku_ + i - j) + j * ldab_]; }

  std::size_t n_ = 0, kl_ = 0, ku_ = 0, ldab_ = 0;
  std::vector<Complex> ab_;
  std::vector<std::size_t> piv_;
};

DenseMatrix direct_dense_solve(const ShiftedOperator& op, const DenseMatrix& rhs_block,
                               std::size_t dense_cap = 4000);

struct BlockSolve {
  DenseMatrix x;
  LinSolveReport report;
};

/// Column-by-column solve with zero initial guess, dispatched on cfg.backend.
/// Columns run concurrently; results are keyed by column index.
BlockSolve solve_block(const ShiftedOperator& op, const DenseMatrix& rhs, const LinSolveConfig& cfg);

/// Per-shift solver that keeps its LU factorization across calls, so the
/// FEAST iterations factor each quadrature node only once.
class ShiftedSolver {
 public:
  ShiftedSolver(const ShiftedOperator& op, LinSolveConfig cfg);

  /// Solves (zB - A)X = rhs, or the adjoint system (conj(z)B - A)X = rhs.
  BlockSolve solve(const DenseMatrix& rhs, bool adjoint = false);

 private:
  ShiftedOperator op_;
  LinSolveConfig cfg_;
  std::unique_ptr<ShiftedFactorization> lu_;
};

}  // namespace feast
