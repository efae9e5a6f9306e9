#include <benchmark/benchmark.h>

#include <random>

#include "liftlab/kernels.hpp"

using namespace liftlab;

namespace {

h2::MatPoly make_poly(Index n, int deg) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<CMatrix> c;
  for (int k = 0; k <= deg; ++k) {
    CMatrix m(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng)) * (0.3 / n);
    c.push_back(m);
  }
  return h2::MatPoly(std::move(c));
}

void BM_EvalGrid(benchmark::State& st) {
  auto P = make_poly(8, 64);
  auto z = kernels::circle_nodes(0.99, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::eval_grid(P, z));
}

void BM_EvalGridSerial(benchmark::State& st) {
  auto P = make_poly(8, 64);
  auto z = kernels::circle_nodes(0.99, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::reference::eval_grid(P, z));
}

void BM_Resolvent(benchmark::State& st) {
  auto P = make_poly(24, 0);
  auto z = kernels::circle_nodes(0.999, static_cast<int>(st.range(0)));
  auto A = kernels::eval_grid(P, z);
  CMatrix rhs = CMatrix::Identity(24, 24);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::resolvent_apply(A, z, rhs));
}

void BM_ResolventSerial(benchmark::State& st) {
  auto P = make_poly(24, 0);
  auto z = kernels::circle_nodes(0.999, static_cast<int>(st.range(0)));
  auto A = kernels::eval_grid(P, z);
  CMatrix rhs = CMatrix::Identity(24, 24);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::reference::resolvent_apply(A, z, rhs));
}

void BM_Dft(benchmark::State& st) {
  std::vector<double> x(static_cast<size_t>(st.range(0)), 0.5);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::dft(x));
}

void BM_DftSerial(benchmark::State& st) {
  std::vector<double> x(static_cast<size_t>(st.range(0)), 0.5);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::reference::dft(x));
}

}  // namespace

BENCHMARK(BM_EvalGrid)->Arg(1024)->Arg(4096);
BENCHMARK(BM_EvalGridSerial)->Arg(1024)->Arg(4096);
BENCHMARK(BM_Resolvent)->Arg(1024)->Arg(4096);
BENCHMARK(BM_ResolventSerial)->Arg(1024)->Arg(4096);
BENCHMARK(BM_Dft)->Arg(1024)->Arg(4096);
BENCHMARK(BM_DftSerial)->Arg(1024)->Arg(4096);

BENCHMARK_MAIN();
