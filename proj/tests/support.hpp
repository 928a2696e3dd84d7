// SPDX-License-Identifier: Apache-2.0
// Test helpers and independent oracles. Nothing here calls into the
// library's numerical routines.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "feast/dense.hpp"
#include "feast/rng.hpp"
#include "feast/sparse.hpp"

namespace testsupport {

using feast::Complex;
using feast::DenseMatrix;

inline DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, bool complex = true) {
  feast::Rng rng(seed);
  DenseMatrix m(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = Complex(rng.normal(), complex ? rng.normal() : 0.0);
  return m;
}

inline DenseMatrix random_hermitian(std::size_t n, std::uint64_t seed, bool complex = true) {
  const DenseMatrix g = random_matrix(n, n, seed, complex);
  DenseMatrix h(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) h(i, j) = 0.5 * (g(i, j) + std::conj(g(j, i)));
  return h;
}

inline DenseMatrix naive_product(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

inline DenseMatrix naive_adjoint(const DenseMatrix& a) {
  DenseMatrix c(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(j, i) = std::conj(a(i, j));
  return c;
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

inline double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (auto v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

/// Cyclic Jacobi on a real symmetric matrix (row-major vector of vectors),
/// swept until the off-diagonal norm falls below 1e-14 of the total.
inline std::vector<double> jacobi_eigenvalues_real(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  auto off = [&] {
    double s = 0.0, t = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        t += a[i][j] * a[i][j];
        if (i != j) s += a[i][j] * a[i][j];
      }
    return std::sqrt(s) / std::max(std::sqrt(t), 1e-300);
  };
  for (int sweep = 0; sweep < 100 && off() > 1e-14; ++sweep)
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::ranges::sort(ev);
  return ev;
}

/// Eigenvalues of a Hermitian matrix through the real embedding
/// [[Re, -Im], [Im, Re]], whose spectrum repeats each eigenvalue twice.
inline std::vector<double> jacobi_eigenvalues(const DenseMatrix& h) {
  const std::size_t n = h.rows();
  std::vector<std::vector<double>> e(2 * n, std::vector<double>(2 * n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      e[i][j] = e[i + n][j + n] = h(i, j).real();
      e[i][j + n] = -h(i, j).imag();
      e[i + n][j] = h(i, j).imag();
    }
  const auto twice = jacobi_eigenvalues_real(std::move(e));
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = 0.5 * (twice[2 * i] + twice[2 * i + 1]);
  return ev;
}

/// Gaussian elimination with partial pivoting, one right-hand side.
inline std::vector<Complex> gauss_solve(DenseMatrix a, std::vector<Complex> b) {
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(b[k], b[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<Complex> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Complex s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

/// Sturm sequence count of eigenvalues below x for the symmetric tridiagonal
/// matrix with diagonal d and off-diagonal e.
inline std::size_t sturm_count(const std::vector<double>& d, const std::vector<double>& e, double x) {
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double off = i == 0 ? 0.0 : e[i - 1] * e[i - 1];
    q = d[i] - x - (i == 0 ? 0.0 : off / q);
    if (q == 0.0) q = -1e-300;
    if (q < 0.0) ++count;
  }
  return count;
}

/// All eigenvalues of a symmetric tridiagonal matrix by bisection on the
/// Sturm count.
inline std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& d, const std::vector<double>& e) {
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < d.size() ? std::abs(e[i]) : 0.0);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
  }
  std::vector<double> ev(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    double a = lo - 1.0, b = hi + 1.0;
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
      const double m = 0.5 * (a + b);
      (sturm_count(d, e, m) > k ? b : a) = m;
    }
    ev[k] = 0.5 * (a + b);
  }
  return ev;
}

/// Adaptive Simpson integration of a complex-valued function.
inline Complex adaptive_simpson(const std::function<Complex(double)>& f, double a, double b, double tol,
                                int depth = 0) {
  const double m = 0.5 * (a + b);
  const Complex fa = f(a), fm = f(m), fb = f(b);
  const Complex whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const Complex left = (m - a) / 6.0 * (fa + 4.0 * f(lm) + fm);
  const Complex right = (b - m) / 6.0 * (fm + 4.0 * f(rm) + fb);
  if (depth > 40 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, 0.5 * tol, depth + 1) + adaptive_simpson(f, m, b, 0.5 * tol, depth + 1);
}

/// (1/2 pi i) \oint dz / (z - lambda) over the ellipse centre c, semi-axes
/// r and aspect * r, integrated adaptively over the full angle.
inline double contour_indicator(double c, double r, double aspect, double lambda) {
  auto f = [&](double t) {
    const Complex z(c + r * std::cos(t), aspect * r * std::sin(t));
    const Complex dz(-r * std::sin(t), aspect * r * std::cos(t));
    return dz / (z - lambda) / Complex(0.0, 2.0 * std::numbers::pi);
  };
  const int pieces = 64;
  Complex s = 0.0;
  for (int k = 0; k < pieces; ++k)
    s += adaptive_simpson(f, 2.0 * std::numbers::pi * k / pieces, 2.0 * std::numbers::pi * (k + 1) / pieces, 1e-15);
  return s.real();
}

/// Gauss-Legendre nodes and weights from the eigen-decomposition of the
/// Legendre Jacobi matrix (Golub-Welsch), nodes only via Jacobi sweeps;
/// weights from the three-term recurrence.
inline std::pair<std::vector<double>, std::vector<double>> golub_welsch(std::size_t m) {
  std::vector<std::vector<double>> j(m, std::vector<double>(m));
  for (std::size_t k = 1; k < m; ++k) {
    const double b = static_cast<double>(k) / std::sqrt(4.0 * k * k - 1.0);
    j[k][k - 1] = j[k - 1][k] = b;
  }
  auto x = jacobi_eigenvalues_real(j);
  std::vector<double> w(m);
  for (std::size_t i = 0; i < m; ++i) {
    double p0 = 1.0, p1 = x[i];
    for (std::size_t k = 2; k <= m; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x[i] * p1 - (k - 1.0) * p0) / static_cast<double>(k);
      p0 = p1;
      p1 = p2;
    }
    // P_m'(x) = m (x P_m - P_{m-1}) / (x^2 - 1)
    const double dp = m == 0 ? 0.0 : static_cast<double>(m) * (x[i] * p1 - p0) / (x[i] * x[i] - 1.0);
    w[i] = 2.0 / ((1.0 - x[i] * x[i]) * dp * dp);
  }
  if (m == 1) w[0] = 2.0;
  return {x, w};
}

inline feast::SparseMatrixCsr diagonal_matrix(const std::vector<double>& d) {
  std::vector<feast::SparseMatrixCsr::Triplet> t;
  for (std::size_t i = 0; i < d.size(); ++i) t.push_back({i, i, d[i]});
  return feast::SparseMatrixCsr::from_triplets(d.size(), std::move(t));
}

/// Random sparse Hermitian matrix with about `per_row` off-diagonal entries
/// per row and a dominant real diagonal when `shift_diag` is set.
inline feast::SparseMatrixCsr random_sparse_hermitian(std::size_t n, std::size_t per_row, std::uint64_t seed,
                                                      bool complex = true, double diag = 0.0) {
  feast::Rng rng(seed);
  std::vector<feast::SparseMatrixCsr::Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, Complex(diag + rng.normal(), 0.0)});
    for (std::size_t k = 0; k < per_row / 2 + 1; ++k) {
      const std::size_t j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)) % n;
      if (j == i) continue;
      const Complex v(rng.normal(), complex ? rng.normal() : 0.0);
      t.push_back({i, j, v});
      t.push_back({j, i, std::conj(v)});
    }
  }
  return feast::SparseMatrixCsr::from_triplets(n, std::move(t));
}

}  // namespace testsupport
