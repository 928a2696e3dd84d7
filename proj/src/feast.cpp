// SPDX-License-Identifier: Apache-2.0
#include "feast/feast.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "feast/errors.hpp"
#include "feast/kernels.hpp"
#include "feast/rng.hpp"
#include "parallel.hpp"

namespace feast {

const char* to_string(FeastStatus s) noexcept {
  switch (s) {
    case FeastStatus::Converged: return "Converged";
    case FeastStatus::MaxIters: return "MaxIters";
    case FeastStatus::Stagnated: return "Stagnated";
  }
  return "?";
}

void FeastConfig::validate() const {
  interval.validate();
  lin.validate();
  if (max_feast_iters < 1) throw InvalidParams("max_feast_iters must be >= 1");
  if (!(trace_tol > 0.0)) throw InvalidParams("trace tolerance must be positive");
  if (!(eps > 0.0)) throw InvalidParams("residual epsilon must be positive");
  if (!(svd_tol > 0.0 && svd_tol < 1.0)) throw InvalidParams("svd_tol must lie in (0, 1)");
  if (reduced_rank_tol < 0.0) throw InvalidParams("reduced_rank_tol must be >= 0");
  if (residual_scale_floor && !(*residual_scale_floor >= 0.0))
    throw InvalidParams("residual_scale_floor must be >= 0");
}

std::size_t RitzSet::count_in_interval() const noexcept {
  return static_cast<std::size_t>(std::ranges::count(in_interval, true));
}

std::vector<double> RitzSet::interval_values() const {
  std::vector<double> out;
  for (std::size_t j = 0; j < size(); ++j)
    if (in_interval[j]) out.push_back(values[j]);
  return out;
}

DenseMatrix RitzSet::interval_vectors() const {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < size(); ++j)
    if (in_interval[j]) idx.push_back(j);
  return vectors.select_cols(idx);
}

StartingBasis StartingBasis::random(std::size_t n, std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  StartingBasis s;
  s.y = DenseMatrix(n, m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < n; ++i) s.y(i, j) = rng.normal();
  return s;
}

StartingBasis StartingBasis::user_supplied(DenseMatrix y) {
  StartingBasis s;
  s.y = std::move(y);
  s.origin = Origin::user_supplied;
  return s;
}

StartingBasis StartingBasis::deflated(const SparseHermitianPencil& pencil, std::size_t m, std::uint64_t seed,
                                      const DenseMatrix& reference, std::size_t count) {
  StartingBasis s = random(pencil.n(), m, seed);
  s.origin = Origin::deflated;
  if (count == 0) return s;
  if (reference.rows() != pencil.n() || count > reference.cols())
    throw InvalidParams("deflated start: reference eigenvectors have the wrong shape");
  const DenseMatrix x = reference.leading_cols(count);
  const DenseMatrix bx = pencil.b ? kernels::spmm(*pencil.b, x) : x;
  const DenseMatrix coeff = kernels::gram(bx, s.y);
  s.y = s.y - kernels::multiply(x, coeff);
  return s;
}

SubspaceBuilder::SubspaceBuilder(const SparseHermitianPencil& pencil, const Contour& contour,
                                 const LinSolveConfig& lin)
    : pencil_(&pencil), contour_(contour) {
  solvers_.reserve(contour.size());
  for (const Complex z : contour.nodes) solvers_.emplace_back(ShiftedOperator(pencil, z), lin);
}

SubspaceResult SubspaceBuilder::build(const DenseMatrix& y, bool parallel, bool exploit_real) {
  const auto& p = *pencil_;
  if (y.rows() != p.n()) throw DimensionMismatch("build_subspace: Y has the wrong row count");
  for (const Complex z : contour_.nodes)
    if (std::abs(z.imag()) < 1e-14) throw PoleOnContour("quadrature node on the real axis");

  const DenseMatrix by = p.b ? kernels::spmm(*p.b, y) : y;
  const bool real_path = exploit_real && p.is_real() && y.is_real();
  const std::size_t nodes = contour_.size();
  std::vector<DenseMatrix> terms(nodes);
  std::vector<LinSolveReport> reports(nodes);

  auto node_term = [&](std::size_t k) {
    const Complex w = contour_.weights[k];
    auto fwd = solvers_[k].solve(by);
    DenseMatrix term(y.rows(), y.cols());
    if (real_path) {
      // (w V - conj(w V)) / (2 pi i) = Im(w V) / pi
      for (std::size_t j = 0; j < y.cols(); ++j) {
        const auto v = fwd.x.col(j);
        auto t = term.col(j);
        for (std::size_t i = 0; i < y.rows(); ++i) t[i] = (w * v[i]).imag() / std::numbers::pi;
      }
      reports[k] = std::move(fwd.report);
    } else {
      auto adj = solvers_[k].solve(by, true);
      const Complex scale = 1.0 / Complex(0.0, 2.0 * std::numbers::pi);
      const Complex wc = std::conj(w);
      for (std::size_t j = 0; j < y.cols(); ++j) {
        const auto v = fwd.x.col(j);
        const auto va = adj.x.col(j);
        auto t = term.col(j);
        for (std::size_t i = 0; i < y.rows(); ++i) t[i] = scale * (w * v[i] - wc * va[i]);
      }
      reports[k] = std::move(fwd.report);
      for (auto& c : adj.report.columns) reports[k].columns.push_back(std::move(c));
    }
    terms[k] = std::move(term);
  };

  if (parallel) {
    detail::parallel_for(nodes, node_term);
  } else {
    for (std::size_t k = 0; k < nodes; ++k) node_term(k);
  }

  SubspaceResult out;
  out.u = DenseMatrix(y.rows(), y.cols());
  const std::size_t len = y.rows() * y.cols();
  for (std::size_t k = 0; k < nodes; ++k) {
    const Complex* t = terms[k].data();
    Complex* u = out.u.data();
    for (std::size_t i = 0; i < len; ++i) u[i] += t[i];
    for (auto& c : reports[k].columns) out.report.columns.push_back(std::move(c));
  }
  return out;
}

SubspaceResult build_subspace(const SparseHermitianPencil& pencil, const Contour& contour, const DenseMatrix& y,
                              const LinSolveConfig& lin) {
  SubspaceBuilder b(pencil, contour, lin);
  return b.build(y);
}

RayleighQuotients rayleigh_quotients(const DenseMatrix& u, const SparseHermitianPencil& pencil) {
  if (u.rows() != pencil.n()) throw DimensionMismatch("rayleigh_quotients: U has the wrong row count");
  auto symmetrize = [](DenseMatrix s) {
    const double scale = max_abs(s);
    if (hermitian_defect(s) > 1e-12 * scale) throw NotHermitian("Rayleigh quotient lost Hermitian symmetry");
    for (std::size_t j = 0; j < s.cols(); ++j) {
      s(j, j) = s(j, j).real();
      for (std::size_t i = 0; i < j; ++i) {
        const Complex h = 0.5 * (s(i, j) + std::conj(s(j, i)));
        s(i, j) = h;
        s(j, i) = std::conj(h);
      }
    }
    return s;
  };
  RayleighQuotients q;
  q.a_u = symmetrize(kernels::gram(u, kernels::spmm(pencil.a, u)));
  q.b_u = symmetrize(kernels::gram(u, pencil.b ? kernels::spmm(*pencil.b, u) : u));
  return q;
}

TraceSignal trace_criterion(double trace_k, double trace_prev, double tol) noexcept {
  if (std::abs(trace_k) < 1e-300) return TraceSignal::DegenerateDenominator;
  return std::abs(trace_k - trace_prev) / std::abs(trace_k) < tol ? TraceSignal::Converged
                                                                   : TraceSignal::NotConverged;
}

double residual_bound(std::size_t n, double lo, double hi, double eps, std::optional<double> floor) {
  double scale = std::max(std::abs(lo), std::abs(hi));
  if (floor) scale = std::max(scale, *floor);
  if (!(scale > 0.0)) throw ZeroScale("residual bound scale is zero");
  return eps * static_cast<double>(n) * scale;
}

std::vector<bool> residual_criterion(const RitzSet& ritz, std::size_t n, const FeastConfig& cfg) {
  const double bound =
      residual_bound(n, cfg.interval.lo, cfg.interval.hi, cfg.eps, cfg.residual_scale_floor);
  std::vector<bool> flags(ritz.size(), false);
  for (std::size_t j = 0; j < ritz.size(); ++j) flags[j] = ritz.in_interval[j] && ritz.residuals[j] <= bound;
  return flags;
}

namespace {

double safe_angle(const DenseMatrix& x1, const DenseMatrix& x2) {
  if (x1.cols() == 0 || x2.cols() == 0) return std::numeric_limits<double>::quiet_NaN();
  try {
    return principal_angle(x1, x2);
  } catch (const RankDeficientInput&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

FeastResult feast_solve(const SparseHermitianPencil& pencil, const FeastConfig& cfg, const StartingBasis& y0) {
  cfg.validate();
  const std::size_t n = pencil.n();
  if (pencil.b && pencil.b->n() != n) throw DimensionMismatch("pencil: A and B differ in size");
  std::size_t m_active = cfg.interval.m_estimate;
  if (y0.y.rows() != n || y0.y.cols() != m_active)
    throw InvalidStartingBasis("starting basis must be n x m_estimate");
  if (m_active > n) throw InvalidStartingBasis("m_estimate exceeds the problem size");
  try {
    if (rank_revealing_basis(y0.y, 1e-12).rank < m_active)
      throw InvalidStartingBasis("starting basis is rank deficient");
  } catch (const ZeroMatrix&) {
    throw InvalidStartingBasis("starting basis is zero");
  }

  const double bound = residual_bound(n, cfg.interval.lo, cfg.interval.hi, cfg.eps, cfg.residual_scale_floor);
  const Contour contour = build_contour(cfg.interval, cfg.quadrature_m, cfg.aspect);
  SubspaceBuilder builder(pencil, contour, cfg.lin);
  Rng pad_rng(derive_seed(cfg.seed, 0x5eed));

  FeastResult result;
  DenseMatrix y = y0.y;
  DenseMatrix prev_in;
  double prev_trace = 0.0;
  std::size_t still = 0;

  for (std::size_t it = 1; it <= cfg.max_feast_iters; ++it) {
    IterationRecord rec;
    rec.iteration = it;

    auto sub = builder.build(y);
    rec.linear_iterations = sub.report.total_iterations();
    rec.linear_residual_max = sub.report.max_residual();
    DenseMatrix u = std::move(sub.u);

    if (cfg.rank_strategy == RankStrategy::svd_reveal) {
      auto rr = rank_revealing_basis(u, cfg.svd_tol);
      u = std::move(rr.basis);
      m_active = rr.rank;
    }
    rec.subspace_dim = u.cols();

    const auto q = rayleigh_quotients(u, pencil);
    if (cfg.rank_strategy == RankStrategy::cholesky_check) rec.b_u_posdef = cholesky_posdef_check(q.b_u);
    const double rtol = cfg.reduced_rank_tol > 0.0 ? cfg.reduced_rank_tol : default_rank_tol(u.cols());
    const auto ge = generalized_eigensolve(q.a_u, q.b_u, rtol);
    rec.effective_rank = cfg.rank_strategy == RankStrategy::svd_reveal ? u.cols() : ge.effective_rank;
    if (cfg.rank_strategy == RankStrategy::svd_reveal) rec.b_u_posdef = ge.effective_rank == u.cols();

    RitzSet ritz;
    ritz.values = ge.values;
    ritz.vectors = kernels::multiply(u, ge.vectors);
    b_normalize(ritz.vectors, pencil);
    const DenseMatrix ax = kernels::spmm(pencil.a, ritz.vectors);
    const DenseMatrix bx = pencil.b ? kernels::spmm(*pencil.b, ritz.vectors) : ritz.vectors;
    ritz.residuals = kernels::residual_norms(ax, bx, ritz.values);
    ritz.in_interval.resize(ritz.size());
    for (std::size_t j = 0; j < ritz.size(); ++j) ritz.in_interval[j] = cfg.interval.contains(ritz.values[j]);
    ritz.converged = residual_criterion(ritz, n, cfg);

    rec.ritz_values = ritz.values;
    rec.ritz_residuals = ritz.residuals;
    rec.in_interval = ritz.count_in_interval();
    rec.residual_bound = bound;
    for (std::size_t j = 0; j < ritz.size(); ++j) {
      if (!ritz.in_interval[j]) continue;
      rec.trace += ritz.values[j];
      const double r = ritz.residuals[j];
      rec.residual_min = std::isnan(rec.residual_min) ? r : std::min(rec.residual_min, r);
      rec.residual_max = std::isnan(rec.residual_max) ? r : std::max(rec.residual_max, r);
    }
    rec.residual_fired =
        rec.in_interval > 0 && std::ranges::count(ritz.converged, true) == static_cast<std::ptrdiff_t>(rec.in_interval);
    if (it >= 2) {
      rec.trace_signal = trace_criterion(rec.trace, prev_trace, cfg.trace_tol);
      if (rec.trace_signal != TraceSignal::DegenerateDenominator)
        rec.trace_change = std::abs(rec.trace - prev_trace) / std::abs(rec.trace);
      rec.trace_fired = rec.trace_signal == TraceSignal::Converged;
    }

    DenseMatrix cur_in = ritz.interval_vectors();
    rec.angle_to_prev_deg = it >= 2 ? safe_angle(cur_in, prev_in) : std::numeric_limits<double>::quiet_NaN();
    if (cfg.reference_eigenspace) rec.angle_to_reference_deg = safe_angle(cur_in, *cfg.reference_eigenspace);

    const bool done = cfg.criterion == Criterion::residual ? rec.residual_fired : rec.trace_fired;
    if (!done && rec.angle_to_prev_deg < 1e-14)
      ++still;
    else
      still = 0;

    prev_trace = rec.trace;
    prev_in = std::move(cur_in);
    result.trace.push_back(std::move(rec));

    const bool last = it == cfg.max_feast_iters;
    if (done || still >= 3 || last) {
      result.status = done ? FeastStatus::Converged : still >= 3 ? FeastStatus::Stagnated : FeastStatus::MaxIters;
      result.ritz = std::move(ritz);
      break;
    }

    // Next Y := X. Directions dropped from B_U keep their slot so the
    // subspace size stays M~ (cholesky_check does not shrink it).
    y = ritz.vectors;
    if (y.cols() < m_active) {
      DenseMatrix extra = kernels::multiply(u, ge.dropped);
      b_normalize(extra, pencil);
      DenseMatrix padded(n, m_active);
      for (std::size_t j = 0; j < y.cols(); ++j) std::ranges::copy(y.col(j), padded.col(j).begin());
      for (std::size_t j = y.cols(); j < m_active; ++j) {
        const std::size_t e = j - y.cols();
        if (e < extra.cols() && norm2(extra.col(e)) > 0.0)
          std::ranges::copy(extra.col(e), padded.col(j).begin());
        else
          for (std::size_t i = 0; i < n; ++i) padded(i, j) = pad_rng.normal();
      }
      y = std::move(padded);
    }
  }
  return result;
}

}  // namespace feast

namespace feast::reference {

SubspaceResult build_subspace(const SparseHermitianPencil& pencil, const Contour& contour, const DenseMatrix& y,
                              const LinSolveConfig& lin) {
  SubspaceBuilder b(pencil, contour, lin);
  return b.build(y, false);
}

}  // namespace feast::reference
