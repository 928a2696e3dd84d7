// SPDX-License-Identifier: Apache-2.0
#include "feast/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <type_traits>

#include "feast/errors.hpp"
#include "feast/kernels.hpp"

namespace feast {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

inline double conj_of(double x) { return x; }
inline Complex conj_of(const Complex& x) { return std::conj(x); }
inline double real_of(double x) { return x; }
inline double real_of(const Complex& x) { return x.real(); }

// Cyclic Jacobi on a column-major Hermitian matrix held in `a`. On return
// the diagonal of `a` carries the eigenvalues and `v` the eigenvectors.
template <class T>
void jacobi_hermitian(std::vector<T>& a, std::vector<T>& v, std::size_t n) {
  v.assign(n * n, T{});
  for (std::size_t i = 0; i < n; ++i) v[i + i * n] = T{1};
  auto at = [&](std::size_t i, std::size_t j) -> T& { return a[i + j * n]; };

  double fro = 0.0;
  for (const auto& x : a) fro += std::norm(Complex(x));
  fro = std::sqrt(fro);
  if (fro == 0.0) return;
  const double skip = 1e-18 * fro;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        if (i != j) off += std::norm(Complex(at(i, j)));
    if (std::sqrt(off) <= 1e-15 * fro) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const T apq = at(p, q);
        const double mag = std::abs(apq);
        if (mag <= skip) continue;
        const T u = apq / mag;
        const T uc = conj_of(u);
        const double app = real_of(at(p, p));
        const double aqq = real_of(at(q, q));
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        T* cp = &a[p * n];
        T* cq = &a[q * n];
        for (std::size_t k = 0; k < n; ++k) {
          const T x = cp[k];
          const T y = uc * cq[k];
          cp[k] = c * x - s * y;
          cq[k] = s * x + c * y;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const T x = at(p, k);
          const T y = u * at(q, k);
          at(p, k) = c * x - s * y;
          at(q, k) = s * x + c * y;
        }
        at(p, q) = T{};
        at(q, p) = T{};
        at(p, p) = T{real_of(at(p, p))};
        at(q, q) = T{real_of(at(q, q))};

        T* vp = &v[p * n];
        T* vq = &v[q * n];
        for (std::size_t k = 0; k < n; ++k) {
          const T x = vp[k];
          const T y = uc * vq[k];
          vp[k] = c * x - s * y;
          vq[k] = s * x + c * y;
        }
      }
    }
  }
}

std::size_t first_significant(std::span<const Complex> v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > 1e-12 * m) return i;
  return v.size();
}

// Fix the phase so that the largest-magnitude entry is real and positive.
void normalize_phase(std::span<Complex> v) {
  std::size_t best = 0;
  double m = -1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > m * (1.0 + 1e-12)) {
      m = a;
      best = i;
    }
  }
  if (m <= 0.0) return;
  const Complex ph = std::conj(v[best]) / m;
  for (auto& x : v) x *= ph;
  v[best] = Complex(v[best].real(), 0.0);
}

}  // namespace

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::leading_cols(std::size_t count) const {
  DenseMatrix out(rows_, count);
  std::copy_n(data_.begin(), rows_ * count, out.data_.begin());
  return out;
}

DenseMatrix DenseMatrix::select_cols(std::span<const std::size_t> idx) const {
  DenseMatrix out(rows_, idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) std::ranges::copy(col(idx[j]), out.col(j).begin());
  return out;
}

bool DenseMatrix::is_real() const noexcept {
  return std::ranges::all_of(data_, [](const Complex& x) { return x.imag() == 0.0; });
}

DenseMatrix adjoint(const DenseMatrix& a) {
  DenseMatrix out(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) out(j, i) = std::conj(a(i, j));
  return out;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix product: inner dimensions differ");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex bkj = b(k, j);
      if (bkj == Complex{}) continue;
      for (std::size_t i = 0; i < a.rows(); ++i) out(i, j) += a(i, k) * bkj;
    }
  return out;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("matrix difference: shapes differ");
  DenseMatrix out(a.rows(), a.cols());
  for (std::size_t k = 0; k < a.rows() * a.cols(); ++k) out.data()[k] = a.data()[k] - b.data()[k];
  return out;
}

double frobenius_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (const auto& x : a.values()) s += std::norm(x);
  return std::sqrt(s);
}

double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (const auto& x : a.values()) m = std::max(m, std::abs(x));
  return m;
}

double norm2(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

double hermitian_defect(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("hermitian check on a non-square matrix");
  double d = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i <= j; ++i) d = std::max(d, std::abs(a(i, j) - std::conj(a(j, i))));
  return d;
}

SpectralFactorization hermitian_eigensolve(const DenseMatrix& s) {
  const std::size_t n = s.rows();
  if (n != s.cols()) throw DimensionMismatch("hermitian_eigensolve: matrix is not square");
  const double scale = max_abs(s);
  if (hermitian_defect(s) > 1e-12 * scale) throw NotHermitian("hermitian_eigensolve: input is not Hermitian");

  SpectralFactorization out;
  out.eigenvalues.resize(n);
  DenseMatrix vecs(n, n);
  std::vector<double> diag(n);

  bool real = true;
  for (std::size_t j = 0; j < n && real; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (s(i, j).imag() != 0.0 && i != j) {
        real = false;
        break;
      }

  if (real) {
    std::vector<double> a(n * n), v;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) a[i + j * n] = 0.5 * (s(i, j).real() + s(j, i).real());
    jacobi_hermitian(a, v, n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a[i + i * n];
    for (std::size_t k = 0; k < n * n; ++k) vecs.data()[k] = v[k];
  } else {
    std::vector<Complex> a(n * n), v;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) a[i + j * n] = 0.5 * (s(i, j) + std::conj(s(j, i)));
    jacobi_hermitian(a, v, n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a[i + i * n].real();
    std::ranges::copy(v, vecs.data());
  }

  std::vector<std::size_t> lead(n);
  for (std::size_t j = 0; j < n; ++j) {
    normalize_phase(vecs.col(j));
    lead[j] = first_significant(vecs.col(j));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::ranges::stable_sort(order, [&](std::size_t x, std::size_t y) {
    if (diag[x] != diag[y]) return diag[x] < diag[y];
    return lead[x] < lead[y];
  });
  out.eigenvectors = vecs.select_cols(order);
  for (std::size_t j = 0; j < n; ++j) out.eigenvalues[j] = diag[order[j]];
  return out;
}

double default_rank_tol(std::size_t subspace_dim) {
  return 1e-12 * static_cast<double>(std::max<std::size_t>(subspace_dim, 1));
}

GeneralizedEigen generalized_eigensolve(const DenseMatrix& a_u, const DenseMatrix& b_u,
                                        double rank_tol) {
  const std::size_t m = a_u.rows();
  if (a_u.cols() != m || b_u.rows() != m || b_u.cols() != m)
    throw DimensionMismatch("generalized_eigensolve: A_U and B_U must be square and equal size");
  if (hermitian_defect(a_u) > 1e-12 * max_abs(a_u))
    throw NotHermitian("generalized_eigensolve: A_U is not Hermitian");

  const auto bf = hermitian_eigensolve(b_u);
  double dmax = 0.0;
  for (double d : bf.eigenvalues) dmax = std::max(dmax, std::abs(d));

  std::vector<std::size_t> keep, drop;
  for (std::size_t j = 0; j < m; ++j) {
    const double d = bf.eigenvalues[j];
    if (dmax > 0.0 && std::abs(d) > rank_tol * dmax) {
      if (d < 0.0) throw IndefiniteB("generalized_eigensolve: B_U has a significant negative direction");
      keep.push_back(j);
    } else {
      drop.push_back(j);
    }
  }

  GeneralizedEigen out;
  out.effective_rank = keep.size();
  out.dropped = bf.eigenvectors.select_cols(drop);
  if (keep.empty()) {
    out.vectors = DenseMatrix(m, 0);
    return out;
  }

  // P = V_r D_r^{-1/2}; the reduced standard problem is P^H A_U P.
  DenseMatrix p = bf.eigenvectors.select_cols(keep);
  for (std::size_t j = 0; j < keep.size(); ++j) {
    const double f = 1.0 / std::sqrt(bf.eigenvalues[keep[j]]);
    for (auto& x : p.col(j)) x *= f;
  }
  DenseMatrix t = adjoint(p) * (a_u * p);
  for (std::size_t j = 0; j < t.cols(); ++j) {
    t(j, j) = t(j, j).real();
    for (std::size_t i = 0; i < j; ++i) {
      const Complex h = 0.5 * (t(i, j) + std::conj(t(j, i)));
      t(i, j) = h;
      t(j, i) = std::conj(h);
    }
  }
  auto tf = hermitian_eigensolve(t);
  out.values = std::move(tf.eigenvalues);
  out.vectors = p * tf.eigenvectors;
  return out;
}

bool cholesky_posdef_check(const DenseMatrix& b_u) {
  const std::size_t n = b_u.rows();
  if (n != b_u.cols()) throw DimensionMismatch("cholesky_posdef_check: matrix is not square");
  double dmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) dmax = std::max(dmax, std::abs(b_u(i, i).real()));
  const double floor = 1e3 * static_cast<double>(n) * kEps * dmax;

  DenseMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = b_u(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > floor)) return false;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = b_u(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return true;
}

ThinQr householder_qr(const DenseMatrix& a_in) {
  const std::size_t n = a_in.rows();
  const std::size_t k = a_in.cols();
  if (n < k) throw DimensionMismatch("householder_qr: more columns than rows");
  DenseMatrix a = a_in;
  std::vector<std::vector<Complex>> reflectors(k);

  for (std::size_t j = 0; j < k; ++j) {
    double xn = 0.0;
    for (std::size_t i = j; i < n; ++i) xn += std::norm(a(i, j));
    xn = std::sqrt(xn);
    if (xn == 0.0) continue;
    const Complex x0 = a(j, j);
    const Complex phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : Complex(1.0);
    const Complex beta = -phase * xn;
    std::vector<Complex> v(n - j);
    for (std::size_t i = j; i < n; ++i) v[i - j] = a(i, j);
    v[0] -= beta;
    const double vn = norm2(v);
    if (vn == 0.0) continue;
    for (auto& x : v) x /= vn;

    for (std::size_t c = j; c < k; ++c) {
      Complex s{};
      for (std::size_t i = j; i < n; ++i) s += std::conj(v[i - j]) * a(i, c);
      s *= 2.0;
      for (std::size_t i = j; i < n; ++i) a(i, c) -= s * v[i - j];
    }
    a(j, j) = beta;
    for (std::size_t i = j + 1; i < n; ++i) a(i, j) = 0.0;
    reflectors[j] = std::move(v);
  }

  ThinQr out;
  out.r = DenseMatrix(k, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i <= j; ++i) out.r(i, j) = a(i, j);

  out.q = DenseMatrix(n, k);
  for (std::size_t j = 0; j < k; ++j) out.q(j, j) = 1.0;
  for (std::size_t jj = k; jj-- > 0;) {
    const auto& v = reflectors[jj];
    if (v.empty()) continue;
    for (std::size_t c = 0; c < k; ++c) {
      Complex s{};
      for (std::size_t i = jj; i < n; ++i) s += std::conj(v[i - jj]) * out.q(i, c);
      s *= 2.0;
      for (std::size_t i = jj; i < n; ++i) out.q(i, c) -= s * v[i - jj];
    }
  }
  return out;
}

Svd jacobi_svd(const DenseMatrix& a_in) {
  const std::size_t m = a_in.rows();
  const std::size_t k = a_in.cols();
  DenseMatrix a = a_in;
  DenseMatrix v = DenseMatrix::identity(k);
  const double tol = kEps * static_cast<double>(std::max<std::size_t>(m, 1));

  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        double alpha = 0.0, beta = 0.0;
        Complex gamma{};
        const auto cp = a.col(p);
        const auto cq = a.col(q);
        for (std::size_t i = 0; i < m; ++i) {
          alpha += std::norm(cp[i]);
          beta += std::norm(cq[i]);
          gamma += std::conj(cp[i]) * cq[i];
        }
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const Complex uc = std::conj(gamma / g);
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t i = 0; i < m; ++i) {
          const Complex x = cp[i];
          const Complex y = uc * cq[i];
          cp[i] = c * x - s * y;
          cq[i] = s * x + c * y;
        }
        const auto vp = v.col(p);
        const auto vq = v.col(q);
        for (std::size_t i = 0; i < k; ++i) {
          const Complex x = vp[i];
          const Complex y = uc * vq[i];
          vp[i] = c * x - s * y;
          vq[i] = s * x + c * y;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sig(k);
  for (std::size_t j = 0; j < k; ++j) sig[j] = norm2(a.col(j));
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::ranges::stable_sort(order, [&](std::size_t x, std::size_t y) { return sig[x] > sig[y]; });

  Svd out;
  out.u = DenseMatrix(m, k);
  out.v = DenseMatrix(k, k);
  out.sigma.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t src = order[j];
    out.sigma[j] = sig[src];
    std::ranges::copy(v.col(src), out.v.col(j).begin());
    if (sig[src] > 0.0)
      for (std::size_t i = 0; i < m; ++i) out.u(i, j) = a(i, src) / sig[src];
  }
  return out;
}

RankRevealed rank_revealing_basis(const DenseMatrix& u, double tol) {
  if (u.rows() < u.cols()) throw DimensionMismatch("rank_revealing_basis: U must be tall");
  const auto qr = householder_qr(u);
  const auto svd = jacobi_svd(qr.r);
  RankRevealed out;
  out.singular_values = svd.sigma;
  const double smax = svd.sigma.empty() ? 0.0 : svd.sigma.front();
  if (!(smax > 0.0)) throw ZeroMatrix("rank_revealing_basis: matrix is zero");
  for (double s : svd.sigma)
    if (s > tol * smax) ++out.rank;
  out.basis = kernels::multiply(qr.q, svd.u.leading_cols(out.rank));
  return out;
}

double principal_angle(const DenseMatrix& x1, const DenseMatrix& x2) {
  if (x1.rows() != x2.rows()) throw DimensionMismatch("principal_angle: row counts differ");
  auto orthonormal = [](const DenseMatrix& x) {
    if (x.cols() == 0 || x.rows() < x.cols())
      throw RankDeficientInput("principal_angle: input cannot have full column rank");
    try {
      auto rr = rank_revealing_basis(x, 1e-12);
      if (rr.rank < x.cols()) throw RankDeficientInput("principal_angle: input is rank deficient");
      return std::move(rr.basis);
    } catch (const ZeroMatrix&) {
      throw RankDeficientInput("principal_angle: input is zero");
    }
  };
  DenseMatrix q1 = orthonormal(x1);
  DenseMatrix q2 = orthonormal(x2);
  if (q2.cols() > q1.cols()) std::swap(q1, q2);

  const DenseMatrix c = kernels::gram(q1, q2);
  const auto sv = jacobi_svd(c);
  const double cmin = std::min(1.0, sv.sigma.back());

  // sine of the largest angle: || (I - Q1 Q1^H) Q2 ||_2
  const DenseMatrix w = q2 - kernels::multiply(q1, c);
  const auto g = hermitian_eigensolve(kernels::gram(w, w));
  const double smax = std::sqrt(std::max(0.0, g.eigenvalues.back()));
  return std::atan2(smax, cmin) * 180.0 / M_PI;
}

DenseMatrix lu_solve(DenseMatrix a, DenseMatrix b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.rows() != n) throw DimensionMismatch("lu_solve: shape mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        piv = i;
      }
    if (best < 1e-300) throw SingularSystem("lu_solve: zero pivot");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(k, j), b(piv, j));
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex l = a(i, k) / a(k, k);
      a(i, k) = l;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
      for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= l * b(k, j);
    }
  }
  for (std::size_t c = 0; c < b.cols(); ++c)
    for (std::size_t ii = n; ii-- > 0;) {
      Complex s = b(ii, c);
      for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * b(j, c);
      b(ii, c) = s / a(ii, ii);
    }
  return b;
}

}  // namespace feast
