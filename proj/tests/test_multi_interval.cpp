// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "feast/errors.hpp"
#include "feast/generators.hpp"
#include "feast/kernels.hpp"
#include "feast/multi_interval.hpp"
#include "support.hpp"

using feast::DenseMatrix;

namespace {

feast::SparseHermitianPencil diag_pencil(std::size_t n) {
  std::vector<double> d(n);
  std::iota(d.begin(), d.end(), 1.0);
  feast::SparseHermitianPencil p;
  p.a = testsupport::diagonal_matrix(d);
  return p;
}

}  // namespace

TEST_CASE("partition validation") {
  feast::Partition p{{0.0, 1.0, 1.0}, {3, 3}};
  CHECK_THROWS_AS(p.validate(), feast::InvalidParams);
  p = {{0.0, 1.0}, {3, 3}};
  CHECK_THROWS_AS(p.validate(), feast::InvalidParams);
  p = {{0.0, 1.0}, {0}};
  CHECK_THROWS_AS(p.validate(), feast::InvalidParams);
  const auto u = feast::Partition::uniform(0.0, 4.0, 4, 2);
  CHECK(u.boundaries == std::vector<double>{0.0, 1.0, 2.0, 3.0, 4.0});
  CHECK_NOTHROW(u.validate());
}

TEST_CASE("K = 1 equals a single solve") {
  const auto p = diag_pencil(12);
  feast::FeastConfig cfg;
  const feast::Partition part{{2.5, 7.5}, {7}};
  const auto merged = feast::solve_partitioned(p, part, cfg, 31);
  auto single_cfg = cfg;
  single_cfg.interval = part.subinterval(0);
  const auto single = feast::feast_solve(p, single_cfg, feast::StartingBasis::random(12, 7, feast::derive_seed(31, 0)));
  CHECK(merged.values == single.ritz.interval_values());
  CHECK(merged.vectors == single.ritz.interval_vectors());
  REQUIRE(merged.orth_local.size() == 1);
  CHECK(merged.orth_global == merged.orth_local[0]);
}

TEST_CASE("diag(1..20), four subintervals") {
  const auto p = diag_pencil(20);
  feast::FeastConfig cfg;
  const auto part = feast::Partition::uniform(0.5, 20.5, 4, 7);
  for (bool parallel : {true, false}) {
    const auto merged = feast::solve_partitioned(p, part, cfg, 32, parallel);
    REQUIRE(merged.values.size() == 20);
    for (std::size_t i = 0; i < 20; ++i) CHECK(merged.values[i] == doctest::Approx(i + 1.0).epsilon(1e-12));
    CHECK(merged.orth_global <= 1e-12);
    for (std::size_t i = 0; i < 20; ++i) CHECK(merged.provenance[i] == i / 5);
  }
}

TEST_CASE("eigenvalue on a shared boundary is kept once") {
  const auto p = diag_pencil(10);
  feast::FeastConfig cfg;
  const feast::Partition part{{0.5, 5.0, 10.5}, {7, 8}};
  const auto merged = feast::solve_partitioned(p, part, cfg, 33);
  REQUIRE(merged.values.size() == 10);
  CHECK(merged.values[4] == doctest::Approx(5.0));
  CHECK(merged.provenance[4] == 0);
}

TEST_CASE("orthogonality matrix examples") {
  const auto p = diag_pencil(20);
  feast::FeastConfig cfg;
  const auto merged = feast::solve_partitioned(p, feast::Partition::uniform(0.5, 20.5, 2, 14), cfg, 34);
  const auto o = feast::orthogonality_matrix(merged, p);
  CHECK(testsupport::max_abs_diff(o, DenseMatrix::identity(o.rows())) <= 1e-12);
  CHECK(o == merged.orthogonality);

  feast::MergedSpectrum twin;
  twin.values = {1.0, 1.0};
  twin.vectors = DenseMatrix(20, 2);
  twin.vectors(3, 0) = twin.vectors(3, 1) = 1.0;
  const auto t = feast::orthogonality_matrix(twin, p);
  CHECK(t(0, 1).real() == doctest::Approx(1.0));
  CHECK(t(1, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("eigencount_below matches independent counts") {
  SUBCASE("tridiagonal, Sturm oracle") {
    const auto t = feast::synthesize_test_matrix(feast::ClusteredTridiagonalParams{120, 9, 1e-12}, 35);
    std::vector<double> d(120), e(119);
    for (std::size_t i = 0; i < 120; ++i) d[i] = t.pencil.a.at(i, i).real();
    for (std::size_t i = 0; i < 119; ++i) e[i] = t.pencil.a.at(i + 1, i).real();
    for (double sigma : {-1.5, -0.3, 0.0, 0.4999, 0.77, 1.5})
      CHECK(feast::eigencount_below(t.pencil, sigma) == testsupport::sturm_count(d, e, sigma));
  }
  SUBCASE("banded pencil with diagonal B, Jacobi oracle") {
    const auto t = feast::synthesize_test_matrix(feast::DiagPencilParams{60, true, 0.1}, 36);
    const DenseMatrix a = t.pencil.a.to_dense();
    DenseMatrix s = a;
    for (std::size_t i = 0; i < 60; ++i)
      for (std::size_t j = 0; j < 60; ++j)
        s(i, j) /= std::sqrt(t.pencil.b->at(i, i).real() * t.pencil.b->at(j, j).real());
    const auto ev = testsupport::jacobi_eigenvalues(s);
    for (double sigma : {0.05, 0.2, 0.5, 0.9}) {
      const auto want = static_cast<std::size_t>(std::ranges::count_if(ev, [&](double v) { return v < sigma; }));
      CHECK(feast::eigencount_below(t.pencil, sigma) == want);
    }
  }
}
