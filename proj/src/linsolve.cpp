// SPDX-License-Identifier: Apache-2.0
#include "feast/linsolve.hpp"

#include <algorithm>
#include <cmath>

#include "feast/errors.hpp"
#include "parallel.hpp"

namespace feast {

void ShiftedOperator::apply(std::span<const Complex> x, std::span<Complex> y) const {
  const auto& p = *pencil_;
  if (x.size() != p.n() || y.size() != p.n()) throw DimensionMismatch("shifted operator: vector length");
  const auto rp = p.a.row_ptr();
  const auto ci = p.a.col_idx();
  const auto av = p.a.values();
  for (std::size_t i = 0; i < p.n(); ++i) {
    Complex s{};
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) s += av[k] * x[ci[k]];
    y[i] = -s;
  }
  if (p.b_is_identity()) {
    for (std::size_t i = 0; i < p.n(); ++i) y[i] += shift_ * x[i];
    return;
  }
  const auto brp = p.b->row_ptr();
  const auto bci = p.b->col_idx();
  const auto bv = p.b->values();
  for (std::size_t i = 0; i < p.n(); ++i) {
    Complex s{};
    for (std::size_t k = brp[i]; k < brp[i + 1]; ++k) s += bv[k] * x[bci[k]];
    y[i] += shift_ * s;
  }
}

std::vector<Complex> ShiftedOperator::apply(std::span<const Complex> x) const {
  std::vector<Complex> y(x.size());
  apply(x, y);
  return y;
}

void LinSolveConfig::validate() const {
  if (!(tol > 0.0 && tol < 1.0)) throw InvalidParams("linear solver tolerance must lie in (0, 1)");
  if (restart < 1) throw InvalidParams("GMRES restart length must be >= 1");
}

bool LinSolveReport::all_converged() const noexcept {
  return std::ranges::all_of(columns, [](const ColumnReport& c) { return c.converged; });
}

std::size_t LinSolveReport::total_iterations() const noexcept {
  std::size_t s = 0;
  for (const auto& c : columns) s += c.iterations;
  return s;
}

double LinSolveReport::max_residual() const noexcept {
  double m = 0.0;
  for (const auto& c : columns) m = std::max(m, c.residual);
  return m;
}

namespace {

double relative_residual(const ShiftedOperator& op, std::span<const Complex> x,
                         std::span<const Complex> rhs, double r0) {
  auto r = op.apply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
  const double nr = norm2(r);
  return r0 > 0.0 ? nr / r0 : nr;
}

Complex dot(std::span<const Complex> a, std::span<const Complex> b) {
  Complex s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

GmresResult gmres_solve(const ShiftedOperator& op, std::span<const Complex> rhs, const LinSolveConfig& cfg,
                        std::span<const Complex> x0) {
  cfg.validate();
  const std::size_t n = op.n();
  if (rhs.size() != n || (!x0.empty() && x0.size() != n)) throw DimensionMismatch("gmres: vector length");
  const std::size_t max_iters = cfg.max_iters == 0 ? 10 * n : cfg.max_iters;
  const std::size_t m = std::min(cfg.restart, n);

  GmresResult out;
  out.x.assign(n, Complex{});
  if (!x0.empty()) std::ranges::copy(x0, out.x.begin());

  std::vector<Complex> r = op.apply(out.x);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
  const double beta0 = norm2(r);
  auto& rep = out.report;
  if (beta0 == 0.0) {
    rep.converged = true;
    return out;
  }
  const double target = cfg.tol * beta0;
  double beta = beta0;

  std::vector<std::vector<Complex>> v(m + 1, std::vector<Complex>(n));
  std::vector<Complex> h((m + 1) * m);
  auto hh = [&](std::size_t i, std::size_t j) -> Complex& { return h[i + j * (m + 1)]; };
  std::vector<double> cs(m);
  std::vector<Complex> sn(m), g(m + 1), y(m), w(n);

  while (rep.iterations < max_iters) {
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    std::ranges::fill(g, Complex{});
    g[0] = beta;
    std::size_t k = 0;
    bool invariant = false;
    for (std::size_t j = 0; j < m && rep.iterations < max_iters; ++j) {
      op.apply(v[j], w);
      const double wnorm = norm2(w);
      for (std::size_t i = 0; i <= j; ++i) {
        hh(i, j) = dot(v[i], w);
        for (std::size_t t = 0; t < n; ++t) w[t] -= hh(i, j) * v[i][t];
      }
      const double hnext = norm2(w);
      for (std::size_t i = 0; i < j; ++i) {
        const Complex a = hh(i, j), b = hh(i + 1, j);
        hh(i, j) = cs[i] * a + sn[i] * b;
        hh(i + 1, j) = -std::conj(sn[i]) * a + cs[i] * b;
      }
      const Complex a = hh(j, j);
      const double denom = std::hypot(std::abs(a), hnext);
      if (denom == 0.0) throw Breakdown("gmres: singular Hessenberg column");
      if (std::abs(a) == 0.0) {
        cs[j] = 0.0;
        sn[j] = 1.0;
      } else {
        cs[j] = std::abs(a) / denom;
        sn[j] = (a / std::abs(a)) * hnext / denom;
      }
      hh(j, j) = cs[j] * a + sn[j] * hnext;
      g[j + 1] = -std::conj(sn[j]) * g[j];
      g[j] = cs[j] * g[j];
      ++rep.iterations;
      k = j + 1;
      const double est = std::abs(g[j + 1]);
      if (cfg.record_history) rep.history.push_back(est / beta0);
      invariant = hnext <= 1e-14 * wnorm;
      if (invariant || est <= target) break;
      for (std::size_t t = 0; t < n; ++t) v[j + 1][t] = w[t] / hnext;
    }

    for (std::size_t i = k; i-- > 0;) {
      Complex s = g[i];
      for (std::size_t l = i + 1; l < k; ++l) s -= hh(i, l) * y[l];
      y[i] = s / hh(i, i);
    }
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t t = 0; t < n; ++t) out.x[t] += y[i] * v[i][t];

    r = op.apply(out.x);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
    const double prev = beta;
    beta = norm2(r);
    if (beta <= target) {
      rep.converged = true;
      break;
    }
    if (invariant && beta >= prev * (1.0 - 1e-12))
      throw Breakdown("gmres: Krylov space became invariant before convergence");
  }
  rep.residual = beta / beta0;
  return out;
}

ShiftedFactorization::ShiftedFactorization(const ShiftedOperator& op, std::size_t dense_cap) : n_(op.n()) {
  if (n_ > dense_cap) throw InvalidParams("direct solver: n exceeds the dense cap");
  const auto& p = op.pencil();
  auto [al, au] = p.a.bandwidth();
  kl_ = al;
  ku_ = au;
  if (p.b) {
    auto [bl, bu] = p.b->bandwidth();
    kl_ = std::max(kl_, bl);
    ku_ = std::max(ku_, bu);
  }
  ldab_ = 2 * kl_ + ku_ + 1;
  ab_.assign(ldab_ * n_, Complex{});
  piv_.resize(n_);

  const Complex z = op.shift();
  auto scatter = [&](const SparseMatrixCsr& s, Complex scale) {
    const auto rp = s.row_ptr();
    const auto ci = s.col_idx();
    const auto v = s.values();
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) at(i, ci[k]) += scale * v[k];
  };
  scatter(p.a, -1.0);
  if (p.b)
    scatter(*p.b, z);
  else
    for (std::size_t i = 0; i < n_; ++i) at(i, i) += z;

  for (std::size_t k = 0; k < n_; ++k) {
    const std::size_t last = std::min(n_ - 1, k + kl_);
    std::size_t pv = k;
    double best = std::abs(at(k, k));
    for (std::size_t i = k + 1; i <= last; ++i)
      if (std::abs(at(i, k)) > best) {
        best = std::abs(at(i, k));
        pv = i;
      }
    if (best < 1e-300) throw SingularSystem("direct solver: zero pivot");
    piv_[k] = pv;
    const std::size_t jend = std::min(n_ - 1, k + kl_ + ku_);
    if (pv != k)
      for (std::size_t j = k; j <= jend; ++j) std::swap(at(k, j), at(pv, j));
    const Complex inv = 1.0 / at(k, k);
    Complex* lk = &at(k, k);
    for (std::size_t i = 1; i <= last - k; ++i) lk[i] *= inv;
    for (std::size_t j = k + 1; j <= jend; ++j) {
      Complex* cj = &at(k, j);
      const Complex ukj = cj[0];
      if (ukj == Complex{}) continue;
      for (std::size_t i = 1; i <= last - k; ++i) cj[i] -= lk[i] * ukj;
    }
  }
}

void ShiftedFactorization::solve_in_place(std::span<Complex> b) const {
  if (b.size() != n_) throw DimensionMismatch("direct solver: rhs length");
  for (std::size_t k = 0; k < n_; ++k) {
    std::swap(b[k], b[piv_[k]]);
    const std::size_t last = std::min(n_ - 1, k + kl_);
    for (std::size_t i = k + 1; i <= last; ++i) b[i] -= at(i, k) * b[k];
  }
  const std::size_t band = kl_ + ku_;
  for (std::size_t k = n_; k-- > 0;) {
    b[k] /= at(k, k);
    const Complex bk = b[k];
    for (std::size_t i = k > band ? k - band : 0; i < k; ++i) b[i] -= at(i, k) * bk;
  }
}

void ShiftedFactorization::solve_adjoint_in_place(std::span<Complex> b) const {
  if (b.size() != n_) throw DimensionMismatch("direct solver: rhs length");
  const std::size_t band = kl_ + ku_;
  for (std::size_t k = 0; k < n_; ++k) {
    Complex s = b[k];
    for (std::size_t j = k > band ? k - band : 0; j < k; ++j) s -= std::conj(at(j, k)) * b[j];
    b[k] = s / std::conj(at(k, k));
  }
  for (std::size_t k = n_; k-- > 0;) {
    const std::size_t last = std::min(n_ - 1, k + kl_);
    Complex s = b[k];
    for (std::size_t i = k + 1; i <= last; ++i) s -= std::conj(at(i, k)) * b[i];
    b[k] = s;
    std::swap(b[k], b[piv_[k]]);
  }
}

namespace {

BlockSolve direct_block(const ShiftedOperator& op, const ShiftedFactorization& lu, const DenseMatrix& rhs,
                        bool adjoint) {
  BlockSolve out{rhs, {}};
  out.report.columns.resize(rhs.cols());
  const ShiftedOperator applied = adjoint ? op.conjugate() : op;
  detail::parallel_for(rhs.cols(), [&](std::size_t j) {
    auto col = out.x.col(j);
    if (adjoint)
      lu.solve_adjoint_in_place(col);
    else
      lu.solve_in_place(col);
    auto& rep = out.report.columns[j];
    rep.residual = relative_residual(applied, col, rhs.col(j), norm2(rhs.col(j)));
    rep.converged = true;
  });
  return out;
}

BlockSolve gmres_block(const ShiftedOperator& op, const DenseMatrix& rhs, const LinSolveConfig& cfg) {
  BlockSolve out{DenseMatrix(rhs.rows(), rhs.cols()), {}};
  out.report.columns.resize(rhs.cols());
  detail::parallel_for(rhs.cols(), [&](std::size_t j) {
    auto res = gmres_solve(op, rhs.col(j), cfg);
    std::ranges::copy(res.x, out.x.col(j).begin());
    out.report.columns[j] = std::move(res.report);
  });
  return out;
}

}  // namespace

DenseMatrix direct_dense_solve(const ShiftedOperator& op, const DenseMatrix& rhs_block, std::size_t dense_cap) {
  if (rhs_block.rows() != op.n()) throw DimensionMismatch("direct solver: rhs rows");
  ShiftedFactorization lu(op, dense_cap);
  return direct_block(op, lu, rhs_block, false).x;
}

BlockSolve solve_block(const ShiftedOperator& op, const DenseMatrix& rhs, const LinSolveConfig& cfg) {
  ShiftedSolver solver(op, cfg);
  return solver.solve(rhs);
}

ShiftedSolver::ShiftedSolver(const ShiftedOperator& op, LinSolveConfig cfg) : op_(op), cfg_(cfg) {
  cfg_.validate();
}

BlockSolve ShiftedSolver::solve(const DenseMatrix& rhs, bool adjoint) {
  if (rhs.rows() != op_.n()) throw DimensionMismatch("solve_block: rhs rows");
  if (cfg_.backend == LinSolveBackend::gmres) return gmres_block(adjoint ? op_.conjugate() : op_, rhs, cfg_);
  if (!lu_) lu_ = std::make_unique<ShiftedFactorization>(op_, cfg_.dense_cap);
  return direct_block(op_, *lu_, rhs, adjoint);
}

}  // namespace feast
