// SPDX-License-Identifier: Apache-2.0
#include "feast/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "feast/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace feast::kernels {

namespace {
constexpr std::size_t kRowBlock = 64;
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

DenseMatrix spmm(const SparseMatrixCsr& s, const DenseMatrix& x) {
  if (s.n() != x.rows()) throw DimensionMismatch("spmm: dimension mismatch");
  const std::size_t n = s.n();
  const std::size_t k = x.cols();
  DenseMatrix out(n, k);
  const auto rp = s.row_ptr();
  const auto ci = s.col_idx();
  const auto va = s.values();
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t j = 0; j < k; ++j) {
      Complex acc{};
      for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) acc += va[p] * x(ci[p], j);
      out(i, j) = acc;
    }
  }
  return out;
}

DenseMatrix gram(const DenseMatrix& x, const DenseMatrix& y) {
  if (x.rows() != y.rows()) throw DimensionMismatch("gram: row counts differ");
  const std::size_t n = x.rows();
  const auto p = static_cast<std::ptrdiff_t>(x.cols());
  const auto q = static_cast<std::ptrdiff_t>(y.cols());
  DenseMatrix out(x.cols(), y.cols());
#pragma omp parallel for collapse(2) schedule(static)
  for (std::ptrdiff_t j = 0; j < q; ++j)
    for (std::ptrdiff_t i = 0; i < p; ++i) {
      const Complex* xi = x.col(static_cast<std::size_t>(i)).data();
      const Complex* yj = y.col(static_cast<std::size_t>(j)).data();
      Complex acc{};
      for (std::size_t r = 0; r < n; ++r) acc += std::conj(xi[r]) * yj[r];
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = acc;
    }
  return out;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("multiply: inner dimensions differ");
  const std::size_t n = a.rows();
  const std::size_t inner = a.cols();
  const std::size_t r = b.cols();
  DenseMatrix out(n, r);
  const auto blocks = static_cast<std::ptrdiff_t>((n + kRowBlock - 1) / kRowBlock);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
    const std::size_t lo = static_cast<std::size_t>(blk) * kRowBlock;
    const std::size_t hi = std::min(n, lo + kRowBlock);
    for (std::size_t j = 0; j < r; ++j) {
      Complex* oj = out.col(j).data();
      for (std::size_t l = 0; l < inner; ++l) {
        const Complex blj = b(l, j);
        const Complex* al = a.col(l).data();
        for (std::size_t i = lo; i < hi; ++i) oj[i] += al[i] * blj;
      }
    }
  }
  return out;
}

std::vector<double> residual_norms(const DenseMatrix& ax, const DenseMatrix& bx,
                                   std::span<const double> lambda) {
  const auto k = static_cast<std::ptrdiff_t>(ax.cols());
  std::vector<double> out(ax.cols());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t jj = 0; jj < k; ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    double s = 0.0;
    for (std::size_t i = 0; i < ax.rows(); ++i) s += std::norm(ax(i, j) - lambda[j] * bx(i, j));
    out[j] = std::sqrt(s);
  }
  return out;
}

}  // namespace feast::kernels

namespace feast::reference {

DenseMatrix spmm(const SparseMatrixCsr& s, const DenseMatrix& x) {
  DenseMatrix out(s.n(), x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const auto y = feast::spmv(s, x.col(j));
    std::ranges::copy(y, out.col(j).begin());
  }
  return out;
}

DenseMatrix gram(const DenseMatrix& x, const DenseMatrix& y) {
  DenseMatrix out(x.cols(), y.cols());
  for (std::size_t j = 0; j < y.cols(); ++j)
    for (std::size_t i = 0; i < x.cols(); ++i) {
      Complex acc{};
      for (std::size_t r = 0; r < x.rows(); ++r) acc += std::conj(x(r, i)) * y(r, j);
      out(i, j) = acc;
    }
  return out;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t l = 0; l < a.cols(); ++l)
      for (std::size_t i = 0; i < a.rows(); ++i) out(i, j) += a(i, l) * b(l, j);
  return out;
}

std::vector<double> residual_norms(const DenseMatrix& ax, const DenseMatrix& bx,
                                   std::span<const double> lambda) {
  std::vector<double> out(ax.cols());
  for (std::size_t j = 0; j < ax.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < ax.rows(); ++i) s += std::norm(ax(i, j) - lambda[j] * bx(i, j));
    out[j] = std::sqrt(s);
  }
  return out;
}

}  // namespace feast::reference

namespace feast {

DenseMatrix b_gram(const DenseMatrix& x, const SparseHermitianPencil& pencil) {
  const DenseMatrix g = kernels::gram(x, pencil.apply_b(x));
  DenseMatrix out(g.rows(), g.cols());
  for (std::size_t k = 0; k < g.rows() * g.cols(); ++k) out.data()[k] = std::abs(g.data()[k]);
  return out;
}

double b_orthogonality(const DenseMatrix& x, const SparseHermitianPencil& pencil) {
  if (x.cols() < 2) return 0.0;
  const DenseMatrix g = b_gram(x, pencil);
  double m = 0.0;
  for (std::size_t j = 0; j < g.cols(); ++j)
    for (std::size_t i = 0; i < g.rows(); ++i)
      if (i != j) m = std::max(m, g(i, j).real());
  return m;
}

void b_normalize(DenseMatrix& x, const SparseHermitianPencil& pencil) {
  const DenseMatrix bx = pencil.apply_b(x);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    Complex s{};
    for (std::size_t i = 0; i < x.rows(); ++i) s += std::conj(x(i, j)) * bx(i, j);
    const double nb = std::sqrt(std::abs(s.real()));
    if (nb > 0.0)
      for (auto& v : x.col(j)) v /= nb;
  }
}

}  // namespace feast
