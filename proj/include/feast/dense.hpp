// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace feast {

using Complex = std::complex<double>;

/// Column-major complex matrix. Holds the reduced (size ~M~) quantities and
/// the tall n x M~ bases.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i + j * rows_]; }
  const Complex& operator()(std::size_t i, std::size_t j) const {
    return data_[i + j * rows_];
  }

  std::span<Complex> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const Complex> col(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }

  Complex* data() noexcept { return data_.data(); }
  const Complex* data() const noexcept { return data_.data(); }
  std::span<const Complex> values() const noexcept { return data_; }

  /// Leading `count` columns as a new matrix.
  DenseMatrix leading_cols(std::size_t count) const;
  /// Selected columns, in the order given.
  DenseMatrix select_cols(std::span<const std::size_t> idx) const;

  /// True when every imaginary part is exactly zero.
  bool is_real() const noexcept;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

DenseMatrix adjoint(const DenseMatrix& a);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
double frobenius_norm(const DenseMatrix& a);
double max_abs(const DenseMatrix& a);
double norm2(std::span<const Complex> v);
/// max |a_ij - conj(a_ji)|
double hermitian_defect(const DenseMatrix& a);

struct SpectralFactorization {
  std::vector<double> eigenvalues;  // ascending
  DenseMatrix eigenvectors;         // orthonormal columns
};

/// Cyclic Jacobi eigensolver for a Hermitian matrix. Real input takes a
/// real-arithmetic path. Throws NotHermitian when the input fails the
/// 1e-12 relative symmetry check.
SpectralFactorization hermitian_eigensolve(const DenseMatrix& s);

struct GeneralizedEigen {
  std::vector<double> values;  // ascending
  DenseMatrix vectors;         // M~ x effective_rank, B_U-orthonormal
  std::size_t effective_rank = 0;
  DenseMatrix dropped;         // M~ x (M~ - effective_rank), discarded directions of B_U
};

/// Default truncation threshold for the reduced pencil, 1e-12 scaled by the
/// subspace dimension.
double default_rank_tol(std::size_t subspace_dim);

/// Solves A_U W = B_U W Lambda on the numerical range of B_U. Directions of
/// B_U with |d| <= rank_tol * max|d| are dropped; a retained negative
/// direction raises IndefiniteB.
GeneralizedEigen generalized_eigensolve(const DenseMatrix& a_u, const DenseMatrix& b_u,
                                        double rank_tol);

/// Cholesky-based definiteness test. A pivot counts as positive only when it
/// exceeds 1e3 * n * eps * max(diag).
bool cholesky_posdef_check(const DenseMatrix& b_u);

struct ThinQr {
  DenseMatrix q;  // n x k, orthonormal columns
  DenseMatrix r;  // k x k, upper triangular
};

/// Householder QR, thin factors. Requires rows >= cols.
ThinQr householder_qr(const DenseMatrix& a);

struct Svd {
  DenseMatrix u;                 // left singular vectors (columns with sigma > 0)
  std::vector<double> sigma;     // descending
  DenseMatrix v;                 // right singular vectors
};

/// One-sided Jacobi SVD of a (rows >= cols). Accurate for small singular
/// values relative to the largest.
Svd jacobi_svd(const DenseMatrix& a);

struct RankRevealed {
  DenseMatrix basis;  // n x rank, orthonormal columns
  std::size_t rank = 0;
  std::vector<double> singular_values;  // all of them, descending
};

/// Orthonormal basis for the numerical column space (SVD backend). Throws
/// ZeroMatrix when sigma_max == 0.
RankRevealed rank_revealing_basis(const DenseMatrix& u, double tol);

/// Largest canonical angle between span(x1) and span(x2), in degrees.
/// Throws RankDeficientInput when either input lacks full column rank.
double principal_angle(const DenseMatrix& x1, const DenseMatrix& x2);

/// Solves a x = b (square, dense) by LU with partial pivoting. Throws
/// SingularSystem on a vanishing pivot.
DenseMatrix lu_solve(DenseMatrix a, DenseMatrix b);

}  // namespace feast
