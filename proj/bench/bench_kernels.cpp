// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>

#include "qbt/kernels.hpp"
#include "qbt/matrix.hpp"

namespace {

qbt::CMatrix random_matrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  qbt::CMatrix m(n, n);
  for (auto& z : m.data()) z = {nd(rng), nd(rng)};
  return m;
}

qbt::CMatrix random_hermitian(std::size_t n, std::uint64_t seed) {
  const qbt::CMatrix a = random_matrix(n, seed);
  return 0.5 * (a + a.adjoint());
}

template <bool Parallel>
void gemm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_matrix(n, 1);
  const auto b = random_matrix(n, 2);
  qbt::CMatrix c(n, n);
  for (auto _ : state) {
    if constexpr (Parallel) {
      qbt::kernels::gemm(a, b, c);
    } else {
      qbt::kernels::serial::gemm(a, b, c);
    }
    benchmark::DoNotOptimize(c.data().data());
  }
}

template <bool Parallel>
void lu(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_matrix(n, 3);
  for (auto _ : state) {
    auto f = Parallel ? qbt::kernels::lu_factor(a, 1e-13) : qbt::kernels::serial::lu_factor(a, 1e-13);
    benchmark::DoNotOptimize(f.lu.data().data());
  }
}

template <bool Parallel>
void jacobi(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto h = random_hermitian(n, 4);
  for (auto _ : state) {
    auto r = Parallel ? qbt::kernels::jacobi_eig<qbt::Complex>(h.data(), n)
                      : qbt::kernels::serial::jacobi_eig<qbt::Complex>(h.data(), n);
    benchmark::DoNotOptimize(r.values.data());
  }
}

}  // namespace

BENCHMARK(gemm<false>)->Name("gemm/serial")->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(gemm<true>)->Name("gemm/parallel")->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(lu<false>)->Name("lu/serial")->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(lu<true>)->Name("lu/parallel")->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(jacobi<false>)->Name("jacobi/serial")->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(jacobi<true>)->Name("jacobi/parallel")->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
