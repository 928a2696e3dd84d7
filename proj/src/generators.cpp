// SPDX-License-Identifier: Apache-2.0
#include "feast/generators.hpp"

#include <algorithm>
#include <cmath>

#include "feast/errors.hpp"
#include "feast/rng.hpp"

namespace feast {

SparseMatrixCsr jacobi_matrix_from_spectrum(std::span<const double> nodes,
                                            std::span<const double> weights) {
  const std::size_t n = nodes.size();
  if (n == 0 || weights.size() != n) throw InvalidParams("jacobi matrix: nodes and weights must match");
  for (double w : weights)
    if (!(w > 0.0)) throw InvalidParams("jacobi matrix: weights must be positive");

  // Index 0 is the border row carrying sqrt(weights); T lives in 1..n.
  std::vector<double> d(n + 1, 0.0), e(n + 1, 0.0);
  std::size_t k = 0;
  for (std::size_t node = 0; node < n; ++node) {
    const double lam = nodes[node];
    if (k == 0) {
      e[0] = std::sqrt(weights[node]);
      d[1] = lam;
      k = 1;
      continue;
    }
    double f = std::sqrt(weights[node]);  // (i-1, L)
    double g = 0.0;                       // (i, L)
    double dl = lam;
    for (std::size_t i = 1; i <= k; ++i) {
      const double r = std::hypot(e[i - 1], f);
      const double c = r == 0.0 ? 1.0 : e[i - 1] / r;
      const double s = r == 0.0 ? 0.0 : f / r;
      const double di = d[i];
      e[i - 1] = r;
      d[i] = c * c * di + 2.0 * c * s * g + s * s * dl;
      const double new_dl = s * s * di - 2.0 * c * s * g + c * c * dl;
      f = c * s * (dl - di) + (c * c - s * s) * g;
      if (i < k) {
        const double ei = e[i];
        e[i] = c * ei;
        g = -s * ei;
      }
      dl = new_dl;
    }
    e[k] = f;
    d[k + 1] = dl;
    ++k;
  }

  std::vector<SparseMatrixCsr::Triplet> t;
  t.reserve(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, d[i + 1]});
    if (i + 1 < n) {
      t.push_back({i, i + 1, e[i + 1]});
      t.push_back({i + 1, i, e[i + 1]});
    }
  }
  return SparseMatrixCsr::from_triplets(n, std::move(t));
}

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i)
    v[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return v;
}

TestPencil tridiagonal_with_spectrum(std::vector<double> spectrum, Rng& rng) {
  std::vector<double> w(spectrum.size());
  for (auto& x : w) x = rng.uniform(0.5, 1.5);
  TestPencil out;
  out.pencil.a = jacobi_matrix_from_spectrum(spectrum, w);
  std::ranges::sort(spectrum);
  out.planted = std::move(spectrum);
  return out;
}

SparseMatrixCsr graph_laplacian(std::size_t n, double density, Rng& rng) {
  if (n < 2) throw InvalidParams("graph_laplacian: n must be at least 2");
  if (!(density > 0.0 && density <= 1.0)) throw InvalidParams("graph_laplacian: edge_density must lie in (0, 1]");
  std::vector<double> w(n);
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 1.0 / std::sqrt(static_cast<double>(i) + 1.0);
    wsum += w[i];
  }
  const double mean_degree = density * static_cast<double>(n - 1);
  std::vector<double> expected(n);
  double esum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    expected[i] = mean_degree * static_cast<double>(n) * w[i] / wsum;
    esum += expected[i];
  }

  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    adj[i].push_back(i + 1);
    adj[i + 1].push_back(i);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 2; j < n; ++j) {
      const double p = std::min(1.0, expected[i] * expected[j] / esum);
      if (rng.uniform() < p) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
    }

  double dmax = 0.0;
  for (const auto& a : adj) dmax = std::max(dmax, static_cast<double>(a.size()));
  std::vector<SparseMatrixCsr::Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, static_cast<double>(adj[i].size()) / dmax});
    for (std::size_t j : adj[i]) t.push_back({i, j, -1.0 / dmax});
  }
  return SparseMatrixCsr::from_triplets(n, std::move(t));
}

// M <- H M H for H = I - 2 v v^T / (v^T v), M dense symmetric row-major.
void reflect(std::vector<double>& m, std::size_t n, const std::vector<double>& v) {
  double vv = 0.0;
  for (double x : v) vv += x * x;
  std::vector<double> mv(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) mv[i] += m[i * n + j] * v[j];
  double vmv = 0.0;
  for (std::size_t i = 0; i < n; ++i) vmv += v[i] * mv[i];
  const double a = 2.0 / vv;
  const double b = 4.0 * vmv / (vv * vv);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m[i * n + j] += -a * (v[i] * mv[j] + mv[i] * v[j]) + b * v[i] * v[j];
}

struct Builder {
  Rng& rng;

  TestPencil operator()(const GraphLaplacianParams& p) const {
    TestPencil out;
    out.pencil.a = graph_laplacian(p.n, p.edge_density, rng);
    return out;
  }

  TestPencil operator()(const SymmetricSpectrumParams& p) const {
    if (p.n < 2) throw InvalidParams("symmetric_spectrum: n must be at least 2");
    const std::size_t blocks = p.n / 2;
    std::vector<SparseMatrixCsr::Triplet> t;
    TestPencil out;
    for (std::size_t k = 0; k < blocks; ++k) {
      const double c = static_cast<double>(k + 1) / static_cast<double>(blocks);
      t.push_back({2 * k, 2 * k + 1, c});
      t.push_back({2 * k + 1, 2 * k, c});
      out.planted.push_back(c);
      out.planted.push_back(-c);
    }
    if (p.n % 2 == 1) {
      t.push_back({p.n - 1, p.n - 1, 0.0});
      out.planted.push_back(0.0);
    }
    std::ranges::sort(out.planted);
    out.pencil.a = SparseMatrixCsr::from_triplets(p.n, std::move(t));
    return out;
  }

  TestPencil operator()(const ClusteredTridiagonalParams& p) const {
    if (p.cluster_size == 0 || p.cluster_size + 2 > p.n)
      throw InvalidParams("clustered_tridiagonal: need 1 <= cluster_size <= n - 2");
    if (!(p.cluster_gap > 0.0 && p.cluster_gap < 1e-3))
      throw InvalidParams("clustered_tridiagonal: cluster_gap must lie in (0, 1e-3)");
    auto spectrum = linspace(-1.0, 1.0, p.n - p.cluster_size);
    const auto hi = std::ranges::upper_bound(spectrum, 0.5);
    const double mid = 0.5 * (*(hi - 1) + *hi);
    const double centre = 0.5 * static_cast<double>(p.cluster_size - 1);
    for (std::size_t j = 0; j < p.cluster_size; ++j)
      spectrum.push_back(mid * (1.0 + (static_cast<double>(j) - centre) * p.cluster_gap));
    return tridiagonal_with_spectrum(std::move(spectrum), rng);
  }

  TestPencil operator()(const MultifoldParams& p) const {
    if (p.multiplicity == 0 || p.multiplicity > p.n)
      throw InvalidParams("multifold: multiplicity must lie in [1, n]");
    const std::size_t rest = p.n - p.multiplicity;
    std::vector<double> d(p.multiplicity, p.eigenvalue);
    const auto below = linspace(p.eigenvalue - 3.0, p.eigenvalue - 1.02, rest - rest / 4);
    const auto above = linspace(p.eigenvalue + 2.5, p.eigenvalue + 4.0, rest / 4);
    d.insert(d.end(), below.begin(), below.end());
    d.insert(d.end(), above.begin(), above.end());

    const std::size_t n = p.n;
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] = d[i];
    for (int r = 0; r < 2; ++r) {
      std::vector<double> v(n);
      for (auto& x : v) x = rng.normal();
      reflect(m, n, v);
    }
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m[i * n + j] + m[j * n + i]);
    TestPencil out;
    out.pencil.a = SparseMatrixCsr::from_dense(a);
    std::ranges::sort(d);
    out.planted = std::move(d);
    return out;
  }

  TestPencil operator()(const DiagPencilParams& p) const {
    TestPencil out;
    out.pencil.a = graph_laplacian(p.n, p.edge_density, rng);
    if (p.b_random_diag) {
      std::vector<double> b(p.n);
      for (auto& x : b) x = rng.uniform(0.5, 1.5);
      out.pencil.b = SparseMatrixCsr::diagonal(b);
    }
    return out;
  }

  TestPencil operator()(const PlantedGapParams& p) const {
    if (p.low_count == 0 || p.low_count >= p.n) throw InvalidParams("planted_gap: need 0 < low_count < n");
    if (!(p.gap_start > 1.0)) throw InvalidParams("planted_gap: gap_start must exceed 1");
    auto spectrum = linspace(0.05, 1.0, p.low_count);
    const auto upper = linspace(p.gap_start, p.gap_start + 6.0, p.n - p.low_count);
    spectrum.insert(spectrum.end(), upper.begin(), upper.end());
    return tridiagonal_with_spectrum(std::move(spectrum), rng);
  }

  TestPencil operator()(const GradedParams& p) const {
    if (p.n < 2 || !(p.lo > 0.0) || !(p.hi > p.lo)) throw InvalidParams("graded: need n >= 2 and 0 < lo < hi");
    std::vector<double> spectrum(p.n);
    for (std::size_t k = 0; k < p.n; ++k)
      spectrum[k] = p.lo * std::pow(p.hi / p.lo, static_cast<double>(k) / static_cast<double>(p.n - 1));
    return tridiagonal_with_spectrum(std::move(spectrum), rng);
  }
};

}  // namespace

TestPencil synthesize_test_matrix(const GeneratorSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  return std::visit(Builder{rng}, spec);
}

std::string kind_name(const GeneratorSpec& spec) {
  static constexpr const char* names[] = {"graph_laplacian", "symmetric_spectrum", "clustered_tridiagonal",
                                          "multifold",       "diag_pencil",        "planted_gap",
                                          "graded"};
  return names[spec.index()];
}

}  // namespace feast
