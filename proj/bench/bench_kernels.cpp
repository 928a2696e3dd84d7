// OpenMP kernels against the serial reference.
#include <benchmark/benchmark.h>

#include "feast/kernels.hpp"
#include "../tests/support.hpp"

namespace {

using feast::DenseMatrix;

template <auto Fn>
void bm_spmm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto s = testsupport::random_sparse_hermitian(n, 8, 1, true, 10.0);
  const DenseMatrix x = testsupport::random_matrix(n, 32, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(s, x));
}

template <auto Fn>
void bm_dense(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DenseMatrix x = testsupport::random_matrix(n, 48, 3);
  const DenseMatrix y = testsupport::random_matrix(n, 48, 4);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(x, y));
}

template <auto Fn>
void bm_multiply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DenseMatrix a = testsupport::random_matrix(n, 48, 5);
  const DenseMatrix b = testsupport::random_matrix(48, 48, 6);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(a, b));
}

}  // namespace

BENCHMARK(bm_spmm<feast::kernels::spmm>)->Arg(2000)->Arg(20000);
BENCHMARK(bm_spmm<feast::reference::spmm>)->Arg(2000)->Arg(20000);
BENCHMARK(bm_dense<feast::kernels::gram>)->Arg(2000)->Arg(20000);
BENCHMARK(bm_dense<feast::reference::gram>)->Arg(2000)->Arg(20000);
BENCHMARK(bm_multiply<feast::kernels::multiply>)->Arg(2000)->Arg(20000);
BENCHMARK(bm_multiply<feast::reference::multiply>)->Arg(2000)->Arg(20000);

BENCHMARK_MAIN();
