// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "feast/contour.hpp"
#include "feast/dense.hpp"
#include "feast/linsolve.hpp"
#include "feast/sparse.hpp"

namespace feast {

enum class Criterion { residual, trace };
enum class RankStrategy { cholesky_check, svd_reveal };
enum class FeastStatus { Converged, MaxIters, Stagnated };

const char* to_string(FeastStatus s) noexcept;

struct FeastConfig {
  SearchInterval interval;
  std::size_t quadrature_m = 8;
  double aspect = 1.0;
  LinSolveConfig lin;
  std::size_t max_feast_iters = 20;
  Criterion criterion = Criterion::residual;
  double trace_tol = 1e-13;
  /// epsilon of the per-pair residual bound eps * n * max(|lo|, |hi|, floor).
  double eps = std::numeric_limits<double>::epsilon();
  std::optional<double> residual_scale_floor;
  RankStrategy rank_strategy = RankStrategy::cholesky_check;
  /// Relative singular value cutoff for svd_reveal.
  double svd_tol = 1e-6;
  /// Truncation threshold for B_U; 0 selects default_rank_tol(M~).
  double reduced_rank_tol = 0.0;
  /// Seed for columns added when B_U loses rank under cholesky_check.
  std::uint64_t seed = 1;
  /// Optional exact eigenspace; when set each iteration records the angle to it.
  std::shared_ptr<const DenseMatrix> reference_eigenspace;

  /// Throws InvalidParams on inconsistent settings.
  void validate() const;
};

struct RitzSet {
  std::vector<double> values;
  DenseMatrix vectors;            // B-normalized columns
  std::vector<double> residuals;  // ||Ax - lambda Bx||
  std::vector<bool> in_interval;
  std::vector<bool> converged;

  std::size_t size() const noexcept { return values.size(); }
  std::size_t count_in_interval() const noexcept;
  /// Values and vectors of the in-interval pairs only.
  std::vector<double> interval_values() const;
  DenseMatrix interval_vectors() const;
};

enum class TraceSignal { Converged, NotConverged, DegenerateDenominator };

struct IterationRecord {
  std::size_t iteration = 0;
  std::vector<double> ritz_values;
  std::vector<double> ritz_residuals;
  std::size_t in_interval = 0;
  double trace = 0.0;
  /// |trace_k - trace_{k-1}| / |trace_k|; NaN on the first iteration or when
  /// the denominator degenerates.
  double trace_change = std::numeric_limits<double>::quiet_NaN();
  TraceSignal trace_signal = TraceSignal::NotConverged;
  double residual_min = std::numeric_limits<double>::quiet_NaN();
  double residual_max = std::numeric_limits<double>::quiet_NaN();
  double residual_bound = 0.0;
  bool residual_fired = false;
  bool trace_fired = false;
  std::size_t subspace_dim = 0;
  std::size_t effective_rank = 0;
  bool b_u_posdef = true;
  double angle_to_prev_deg = std::numeric_limits<double>::quiet_NaN();
  double angle_to_reference_deg = std::numeric_limits<double>::quiet_NaN();
  std::size_t linear_iterations = 0;
  double linear_residual_max = 0.0;
};

using IterationTrace = std::vector<IterationRecord>;

struct StartingBasis {
  enum class Origin { random, user_supplied, deflated };

  DenseMatrix y;
  Origin origin = Origin::random;

  /// Gaussian n x m basis.
  static StartingBasis random(std::size_t n, std::size_t m, std::uint64_t seed);
  static StartingBasis user_supplied(DenseMatrix y);
  /// The random basis for `seed` with span(X) projected out, Y := (I - X X^H B) Y,
  /// where X holds the first `count` columns of `reference` (B-orthonormal).
  static StartingBasis deflated(const SparseHermitianPencil& pencil, std::size_t m, std::uint64_t seed,
                                const DenseMatrix& reference, std::size_t count);
};

struct SubspaceResult {
  DenseMatrix u;
  LinSolveReport report;  // columns of every node solve, node-major
};

/// Applies the quadrature filter to Y. Keeps one solver per node so that
/// direct factorizations are reused across calls.
class SubspaceBuilder {
 public:
  SubspaceBuilder(const SparseHermitianPencil& pencil, const Contour& contour, const LinSolveConfig& lin);

  /// U = (1/2 pi i) sum_k [w_k G(z_k) - conj(w_k) G(conj z_k)] B Y with
  /// G(z) = (zB - A)^{-1}. Real pencils with real Y take one solve per node.
  /// `parallel` fans the nodes out over threads; the sum order is fixed.
  SubspaceResult build(const DenseMatrix& y, bool parallel = true, bool exploit_real = true);

 private:
  const SparseHermitianPencil* pencil_;
  Contour contour_;
  std::vector<ShiftedSolver> solvers_;
};

SubspaceResult build_subspace(const SparseHermitianPencil& pencil, const Contour& contour, const DenseMatrix& y,
                              const LinSolveConfig& lin);

struct RayleighQuotients {
  DenseMatrix a_u;
  DenseMatrix b_u;
};

/// U^H A U and U^H B U, symmetrized.
RayleighQuotients rayleigh_quotients(const DenseMatrix& u, const SparseHermitianPencil& pencil);

struct FeastResult {
  RitzSet ritz;
  IterationTrace trace;
  FeastStatus status = FeastStatus::MaxIters;
};

/// Throws InvalidStartingBasis when Y0 does not have full column rank or the
/// wrong shape.
FeastResult feast_solve(const SparseHermitianPencil& pencil, const FeastConfig& cfg, const StartingBasis& y0);

TraceSignal trace_criterion(double trace_k, double trace_prev, double tol) noexcept;

/// eps * n * max(|lo|, |hi|, floor). Throws ZeroScale when that scale is 0.
double residual_bound(std::size_t n, double lo, double hi, double eps, std::optional<double> floor);

/// Per-pair flags: in-interval and residual within the bound.
std::vector<bool> residual_criterion(const RitzSet& ritz, std::size_t n, const FeastConfig& cfg);

}  // namespace feast

namespace feast::reference {

/// Serial node loop, for checking the threaded path.
SubspaceResult build_subspace(const SparseHermitianPencil& pencil, const Contour& contour, const DenseMatrix& y,
                              const LinSolveConfig& lin);

}  // namespace feast::reference
