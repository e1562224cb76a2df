#include <benchmark/benchmark.h>

#include <random>

#include "lemll/metrics.hpp"
#include "lemll/neighborhood.hpp"

using namespace lemll;

namespace {

Matrix points(Eigen::Index n, Eigen::Index d) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Matrix x(n, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = g(rng);
  }
  return x;
}

void BM_knn(benchmark::State& state) {
  const Matrix x = points(state.range(0), 10);
  for (auto _ : state) benchmark::DoNotOptimize(knn(x, 10));
}

void BM_knn_reference(benchmark::State& state) {
  const Matrix x = points(state.range(0), 10);
  for (auto _ : state) benchmark::DoNotOptimize(knn_reference(x, 10));
}

void BM_lle(benchmark::State& state) {
  const Matrix x = points(state.range(0), 10);
  const auto nbrs = knn(x, 10);
  for (auto _ : state) benchmark::DoNotOptimize(lle_weights(x, nbrs));
}

void BM_lle_reference(benchmark::State& state) {
  const Matrix x = points(state.range(0), 10);
  const auto nbrs = knn(x, 10);
  for (auto _ : state) benchmark::DoNotOptimize(lle_weights_reference(x, nbrs));
}

void BM_evaluate(benchmark::State& state) {
  const Eigen::Index n = state.range(0), l = 20;
  const Matrix s = points(n, l);
  LabelMatrix y(n, l);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < l; ++j) y(i, j) = s(i, j) > 0.5 ? 1 : -1;
  }
  for (auto _ : state) benchmark::DoNotOptimize(metrics::evaluate(s, y, y));
}

}  // namespace

BENCHMARK(BM_knn)->Arg(500)->Arg(2000);
BENCHMARK(BM_knn_reference)->Arg(500)->Arg(2000);
BENCHMARK(BM_lle)->Arg(500)->Arg(2000);
BENCHMARK(BM_lle_reference)->Arg(500)->Arg(2000);
BENCHMARK(BM_evaluate)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
