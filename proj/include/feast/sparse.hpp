// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "feast/dense.hpp"

namespace feast {

/// Square complex matrix in compressed sparse row form. Column indices
/// inside a row are strictly increasing.
class SparseMatrixCsr {
 public:
  SparseMatrixCsr() = default;
  /// Validates the structural invariants; throws InvalidParams otherwise.
  SparseMatrixCsr(std::size_t n, std::vector<std::size_t> row_ptr,
                  std::vector<std::size_t> col_idx, std::vector<Complex> values);

  struct Triplet {
    std::size_t row;
    std::size_t col;
    Complex value;
  };
  /// Builds from unordered triplets; duplicates are summed.
  static SparseMatrixCsr from_triplets(std::size_t n, std::vector<Triplet> triplets);
  static SparseMatrixCsr identity(std::size_t n);
  static SparseMatrixCsr diagonal(std::span<const double> d);
  static SparseMatrixCsr from_dense(const DenseMatrix& d, double drop_tol = 0.0);

  std::size_t n() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
  std::span<const Complex> values() const noexcept { return values_; }

  /// A(i, j), zero when not stored.
  Complex at(std::size_t i, std::size_t j) const;
  DenseMatrix to_dense() const;
  double max_abs() const;
  bool is_real() const noexcept;
  /// True when ||S - S^H||_max <= 1e-12 ||S||_max.
  bool is_hermitian() const;
  /// Lower and upper bandwidth of the stored pattern.
  std::pair<std::size_t, std::size_t> bandwidth() const;

  bool operator==(const SparseMatrixCsr&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<Complex> values_;
};

/// The pair (A, B). An absent B stands for the identity.
struct SparseHermitianPencil {
  SparseMatrixCsr a;
  std::optional<SparseMatrixCsr> b;

  std::size_t n() const noexcept { return a.n(); }
  bool b_is_identity() const noexcept { return !b.has_value(); }
  bool is_real() const noexcept { return a.is_real() && (!b || b->is_real()); }

  /// Checks dimensions, Hermiticity of both matrices, and x^H B x > 0 for
  /// 20 random real vectors. Throws InvalidParams / NotHermitian.
  void validate(std::uint64_t seed = 7) const;

  DenseMatrix apply_a(const DenseMatrix& x) const;
  DenseMatrix apply_b(const DenseMatrix& x) const;
};

std::vector<Complex> spmv(const SparseMatrixCsr& s, std::span<const Complex> x);
DenseMatrix spmm(const SparseMatrixCsr& s, const DenseMatrix& x);

/// Reads coordinate or array Matrix Market files (real/complex/integer,
/// general/symmetric/hermitian). Symmetric storage is expanded and
/// duplicate entries are summed.
SparseMatrixCsr read_matrix_market(const std::filesystem::path& path);
SparseMatrixCsr parse_matrix_market(std::istream& in);

/// Writes `general` coordinate format, 17 significant digits, `real` when
/// every imaginary part is zero.
void write_matrix_market(const std::filesystem::path& path, const SparseMatrixCsr& s);
void write_matrix_market(std::ostream& out, const SparseMatrixCsr& s);

}  // namespace feast
