#include <random>
#include <vector>

#include <benchmark/benchmark.h>
#include <Eigen/Dense>

#include "hurstarb/covariance.hpp"
#include "hurstarb/hurst_process.hpp"
#include "hurstarb/loo_predictor.hpp"
#include "hurstarb/variogram.hpp"

using namespace hurstarb;

static void BM_FbmPath(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fbm_path(0.05, 1.0 / 3600.0, n, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FbmPath)->Arg(8760)->Arg(87600)->Arg(876000)->Unit(benchmark::kMillisecond);

static std::vector<TimedPrice> year_of_prices() {
  const auto path = fbm_path(0.0, 1.0 / 3600.0, 8760, 3);
  std::vector<TimedPrice> pts(path.size());
  for (std::size_t h = 0; h < path.size(); ++h) pts[h] = {double(h), std::exp(1e-3 * path[h])};
  return pts;
}

static void BM_VariogramTwoPoint(benchmark::State& state) {
  const auto pts = year_of_prices();
  const auto grid = integer_tau_grid(1.0, 200.0, 10);
  for (auto _ : state) benchmark::DoNotOptimize(variogram_two_point(pts, grid, TwoPointMode::FullResolution));
}
BENCHMARK(BM_VariogramTwoPoint)->Unit(benchmark::kMillisecond);

static void BM_VariogramDiffOfAvg(benchmark::State& state) {
  const auto pts = year_of_prices();
  const auto grid = integer_tau_grid(1.0, 200.0, 10);
  for (auto _ : state) benchmark::DoNotOptimize(variogram_diff_of_avg(pts, grid));
}
BENCHMARK(BM_VariogramDiffOfAvg)->Unit(benchmark::kMillisecond);

static Eigen::MatrixXd random_spd(Eigen::Index n) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  Eigen::MatrixXd G(n, n);
  for (Eigen::Index i = 0; i < G.size(); ++i) G.data()[i] = z(rng);
  return G * G.transpose() / static_cast<double>(n) + 0.1 * Eigen::MatrixXd::Identity(n, n);
}

static void BM_InvertAndLooCoefficients(benchmark::State& state) {
  const auto C = random_spd(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(loo_coefficients(invert_with_ridge(C, default_ridge(C))));
}
BENCHMARK(BM_InvertAndLooCoefficients)->Arg(10)->Arg(100)->Arg(500)->Unit(benchmark::kMicrosecond);

static void BM_PartitionedInverse(benchmark::State& state) {
  const auto C = random_spd(state.range(0));
  const Eigen::MatrixXd A = C.inverse();
  for (auto _ : state) benchmark::DoNotOptimize(partitioned_inverse(A, 0));
}
BENCHMARK(BM_PartitionedInverse)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);

static void BM_DeletionInverse(benchmark::State& state) {
  const auto C = random_spd(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(deletion_inverse(C, 0));
}
BENCHMARK(BM_DeletionInverse)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
