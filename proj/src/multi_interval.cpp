// SPDX-License-Identifier: Apache-2.0
#include "feast/multi_interval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "feast/errors.hpp"
#include "feast/kernels.hpp"
#include "feast/rng.hpp"
#include "parallel.hpp"

namespace feast {

void Partition::validate() const {
  if (m_estimates.empty() || boundaries.size() != m_estimates.size() + 1)
    throw InvalidParams("partition needs K >= 1 subintervals and K + 1 boundaries");
  for (std::size_t k = 0; k + 1 < boundaries.size(); ++k)
    if (!(boundaries[k] < boundaries[k + 1])) throw InvalidParams("partition boundaries must ascend strictly");
  for (std::size_t m : m_estimates)
    if (m == 0) throw InvalidParams("partition M~ must be positive");
}

Partition Partition::uniform(double lo, double hi, std::size_t k, std::size_t m_each) {
  if (k == 0) throw InvalidParams("partition needs K >= 1");
  Partition p;
  for (std::size_t i = 0; i <= k; ++i)
    p.boundaries.push_back(i == k ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k));
  p.m_estimates.assign(k, m_each);
  p.validate();
  return p;
}

DenseMatrix orthogonality_matrix(const MergedSpectrum& merged, const SparseHermitianPencil& pencil) {
  return b_gram(merged.vectors, pencil);
}

MergedSpectrum solve_partitioned(const SparseHermitianPencil& pencil, const Partition& partition,
                                 const FeastConfig& cfg_template, std::uint64_t seed, bool parallel) {
  partition.validate();
  const std::size_t k_count = partition.count();
  MergedSpectrum out;
  out.runs.resize(k_count);

  auto run = [&](std::size_t k) {
    FeastConfig cfg = cfg_template;
    cfg.interval = partition.subinterval(k);
    cfg.seed = derive_seed(seed, k_count + k);
    out.runs[k] = feast_solve(pencil, cfg, StartingBasis::random(pencil.n(), cfg.interval.m_estimate,
                                                                 derive_seed(seed, k)));
  };
  if (parallel)
    detail::parallel_for(k_count, run);
  else
    for (std::size_t k = 0; k < k_count; ++k) run(k);

  const double scale = std::max({std::abs(partition.boundaries.front()), std::abs(partition.boundaries.back()),
                                 std::numeric_limits<double>::min()});
  struct Pick {
    std::size_t run, col;
  };
  std::vector<Pick> picks;
  for (std::size_t k = 0; k < k_count; ++k) {
    const auto& r = out.runs[k].ritz;
    const double b = partition.boundaries[k];
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (!r.in_interval[j]) continue;
      bool duplicate = false;
      if (k > 0 && std::abs(r.values[j] - b) <= 1e-12 * scale) {
        const auto& lower = out.runs[k - 1].ritz;
        for (std::size_t i = 0; i < lower.size() && !duplicate; ++i) {
          if (!lower.in_interval[i] || std::abs(lower.values[i] - b) > 1e-12 * scale) continue;
          DenseMatrix pair(pencil.n(), 2);
          std::ranges::copy(lower.vectors.col(i), pair.col(0).begin());
          std::ranges::copy(r.vectors.col(j), pair.col(1).begin());
          duplicate = b_gram(pair, pencil)(0, 1).real() >= 0.5;
        }
      }
      if (!duplicate) picks.push_back({k, j});
    }
  }
  std::ranges::stable_sort(picks, [&](const Pick& a, const Pick& b) {
    return out.runs[a.run].ritz.values[a.col] < out.runs[b.run].ritz.values[b.col];
  });

  out.vectors = DenseMatrix(pencil.n(), picks.size());
  for (std::size_t i = 0; i < picks.size(); ++i) {
    const auto& r = out.runs[picks[i].run].ritz;
    out.values.push_back(r.values[picks[i].col]);
    out.residuals.push_back(r.residuals[picks[i].col]);
    out.provenance.push_back(picks[i].run);
    std::ranges::copy(r.vectors.col(picks[i].col), out.vectors.col(i).begin());
  }

  out.orthogonality = orthogonality_matrix(out, pencil);
  out.orth_local.assign(k_count, 0.0);
  for (std::size_t j = 0; j < picks.size(); ++j)
    for (std::size_t i = 0; i < picks.size(); ++i) {
      if (i == j) continue;
      const double v = out.orthogonality(i, j).real();
      out.orth_global = std::max(out.orth_global, v);
      if (out.provenance[i] == out.provenance[j])
        out.orth_local[out.provenance[i]] = std::max(out.orth_local[out.provenance[i]], v);
    }
  return out;
}

std::size_t eigencount_below(const SparseHermitianPencil& pencil, double sigma) {
  const std::size_t n = pencil.n();
  std::size_t bw = pencil.a.bandwidth().first;
  if (pencil.b) bw = std::max(bw, pencil.b->bandwidth().first);

  // Lower band of S = A - sigma B: l(i, d) holds S(i, i - d), d = 0..bw.
  const std::size_t w = bw + 1;
  std::vector<Complex> l(n * w);
  auto at = [&](std::size_t i, std::size_t j) -> Complex& { return l[i * w + (i - j)]; };
  auto scatter = [&](const SparseMatrixCsr& s, double f) {
    const auto rp = s.row_ptr();
    const auto ci = s.col_idx();
    const auto v = s.values();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k)
        if (ci[k] <= i) at(i, ci[k]) += f * v[k];
  };
  scatter(pencil.a, 1.0);
  if (pencil.b)
    scatter(*pencil.b, -sigma);
  else
    for (std::size_t i = 0; i < n; ++i) at(i, i) -= sigma;

  const double tiny = std::numeric_limits<double>::epsilon() * std::max(pencil.a.max_abs(), 1.0) * 1e-3;
  std::vector<double> d(n);
  std::size_t negative = 0;
  for (std::size_t j = 0; j < n; ++j) {
    // S(j,j) - sum_k |L(j,k)|^2 d_k, then column j of L below the diagonal.
    const std::size_t k0 = j > bw ? j - bw : 0;
    double djj = at(j, j).real();
    for (std::size_t k = k0; k < j; ++k) djj -= std::norm(at(j, k)) * d[k];
    if (djj == 0.0) djj = -tiny;
    d[j] = djj;
    if (djj < 0.0) ++negative;
    const std::size_t iend = std::min(n - 1, j + bw);
    for (std::size_t i = j + 1; i <= iend; ++i) {
      Complex s = at(i, j);
      const std::size_t kk = i > bw ? i - bw : 0;
      for (std::size_t k = std::max(k0, kk); k < j; ++k) s -= at(i, k) * std::conj(at(j, k)) * d[k];
      at(i, j) = s / djj;
    }
  }
  return negative;
}

}  // namespace feast
