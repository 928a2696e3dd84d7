// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "feast/feast.hpp"

namespace feast {

/// K subintervals [boundaries[k], boundaries[k+1]] with one M~ each.
struct Partition {
  std::vector<double> boundaries;
  std::vector<std::size_t> m_estimates;

  std::size_t count() const noexcept { return m_estimates.size(); }
  SearchInterval subinterval(std::size_t k) const {
    return {boundaries[k], boundaries[k + 1], m_estimates[k]};
  }
  /// Throws InvalidParams unless boundaries ascend strictly, there are
  /// K + 1 of them and every M~ is positive.
  void validate() const;

  static Partition uniform(double lo, double hi, std::size_t k, std::size_t m_each);
};

struct MergedSpectrum {
  std::vector<FeastResult> runs;
  std::vector<double> values;          // ascending
  DenseMatrix vectors;
  std::vector<double> residuals;
  std::vector<std::size_t> provenance; // subinterval of each merged pair
  std::vector<double> orth_local;      // per subinterval
  double orth_global = 0.0;
  DenseMatrix orthogonality;           // |x_i^H B x_j|
};

/// Runs feast_solve on every subinterval (concurrently when `parallel`),
/// with starting basis seed derive_seed(seed, k). A pair reported by both
/// neighbours of a boundary (value within 1e-12 relative of it and the same
/// eigenvector) is kept only for the lower subinterval.
MergedSpectrum solve_partitioned(const SparseHermitianPencil& pencil, const Partition& partition,
                                 const FeastConfig& cfg_template, std::uint64_t seed, bool parallel = true);

/// |X^H B X| for the merged vectors.
DenseMatrix orthogonality_matrix(const MergedSpectrum& merged, const SparseHermitianPencil& pencil);

/// Number of eigenvalues of (A, B) below sigma, from the inertia of
/// A - sigma B (band LDL^T without pivoting, Sturm count for tridiagonals).
std::size_t eigencount_below(const SparseHermitianPencil& pencil, double sigma);

}  // namespace feast
