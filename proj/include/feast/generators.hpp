// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "feast/sparse.hpp"

namespace feast {

/// Sparse graph Laplacian of a heterogeneous (Chung-Lu) random graph with a
/// path backbone, scaled by 1 / max degree. B = I.
struct GraphLaplacianParams {
  std::size_t n = 300;
  double edge_density = 0.02;
};

/// A = blockdiag([[0, c_k], [c_k, 0]]), c_k = k / (n/2): eigenvalues +-c_k.
/// Odd n appends a zero. B = I.
struct SymmetricSpectrumParams {
  std::size_t n = 100;
};

/// Unreduced tridiagonal matrix with a planted spectrum: n - cluster_size
/// values on a uniform grid of [-1, 1] plus cluster_size values near 0.5 with
/// consecutive relative gaps cluster_gap. B = I.
struct ClusteredTridiagonalParams {
  std::size_t n = 2003;
  std::size_t cluster_size = 99;
  double cluster_gap = 1e-12;
};

/// Dense symmetric A = Q D Q^T (Q two random Householder reflectors) where D
/// holds `eigenvalue` with the given multiplicity; of the remaining values
/// three quarters are spread evenly over eigenvalue - [1.02, 3] and one
/// quarter over eigenvalue + [2.5, 4]. The interval
/// [eigenvalue - 1, eigenvalue + 1] encloses exactly the multiple eigenvalue.
struct MultifoldParams {
  std::size_t n = 470;
  double eigenvalue = 1.0;
  std::size_t multiplicity = 57;
};

/// A = graph Laplacian (as above), B diagonal with entries uniform in
/// [0.5, 1.5] (or B = I when b_random_diag is false).
struct DiagPencilParams {
  std::size_t n = 395;
  bool b_random_diag = true;
  double edge_density = 0.02;
};

/// Tridiagonal with a planted spectrum: low_count values evenly spaced in
/// [0.05, 1], the rest evenly spaced in [gap_start, gap_start + 6]. B = I.
struct PlantedGapParams {
  std::size_t n = 200;
  std::size_t low_count = 30;
  double gap_start = 4.0;
};

/// Tridiagonal with a geometrically graded planted spectrum lo..hi (no
/// clusters, wide dynamic range). B = I.
struct GradedParams {
  std::size_t n = 600;
  double lo = 10.5;
  double hi = 3.8e7;
};

using GeneratorSpec = std::variant<GraphLaplacianParams, SymmetricSpectrumParams,
                                   ClusteredTridiagonalParams, MultifoldParams, DiagPencilParams,
                                   PlantedGapParams, GradedParams>;

struct TestPencil {
  SparseHermitianPencil pencil;
  /// Ascending planted eigenvalues; empty when the construction does not
  /// fix the spectrum.
  std::vector<double> planted;
};

/// Deterministic for a fixed seed. Throws InvalidParams on bad parameters.
TestPencil synthesize_test_matrix(const GeneratorSpec& spec, std::uint64_t seed);

std::string kind_name(const GeneratorSpec& spec);

/// Symmetric tridiagonal (Jacobi) matrix whose eigenvalues are `nodes`,
/// with first eigenvector components proportional to sqrt(weights).
/// O(n^2) Givens bulge chasing; weights must be positive.
SparseMatrixCsr jacobi_matrix_from_spectrum(std::span<const double> nodes,
                                            std::span<const double> weights);

}  // namespace feast
