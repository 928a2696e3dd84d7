// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "feast/dense.hpp"
#include "feast/sparse.hpp"

// Tall-matrix kernels that dominate FEAST cost: O(nnz * M~) sparse products
// and O(n * M~^2) Gram/basis products. Each output entry is accumulated in a
// fixed order, so the OpenMP versions agree bit for bit with the serial
// reference versions regardless of thread count.

namespace feast::kernels {

DenseMatrix spmm(const SparseMatrixCsr& s, const DenseMatrix& x);
/// X^H Y
DenseMatrix gram(const DenseMatrix& x, const DenseMatrix& y);
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
/// Column-wise residual norms ||AX_j - lambda_j BX_j||.
std::vector<double> residual_norms(const DenseMatrix& ax, const DenseMatrix& bx,
                                   std::span<const double> lambda);

int max_threads();
void set_threads(int n);

}  // namespace feast::kernels

namespace feast::reference {

DenseMatrix spmm(const SparseMatrixCsr& s, const DenseMatrix& x);
DenseMatrix gram(const DenseMatrix& x, const DenseMatrix& y);
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
std::vector<double> residual_norms(const DenseMatrix& ax, const DenseMatrix& bx,
                                   std::span<const double> lambda);

}  // namespace feast::reference

namespace feast {

/// max_{i != j} |x_i^H B x_j|; 0 for a single column. Columns are expected to
/// be B-normalized by the caller.
double b_orthogonality(const DenseMatrix& x, const SparseHermitianPencil& pencil);

/// |X^H B X| entrywise, the full pairwise orthogonality picture.
DenseMatrix b_gram(const DenseMatrix& x, const SparseHermitianPencil& pencil);

/// Scales each column to unit B-norm. Zero columns are left untouched.
void b_normalize(DenseMatrix& x, const SparseHermitianPencil& pencil);

}  // namespace feast
