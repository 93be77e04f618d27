#include <benchmark/benchmark.h>

#include "burkholder/families.hpp"
#include "burkholder/identities.hpp"
#include "burkholder/optimizer.hpp"
#include "burkholder/radial.hpp"

using namespace burkholder;

static void BM_EvalL(benchmark::State& state) {
  Rng rng(1);
  std::vector<WirtingerPair> pairs;
  for (int i = 0; i < 1024; ++i) {
    pairs.push_back({std::polar(rng.uniform(0, 1), rng.angle()), std::polar(rng.uniform(0, 1), rng.angle())});
  }
  for (auto _ : state) {
    double s = 0.0;
    for (const auto& p : pairs) s += eval_L(p);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_EvalL);

static void BM_EnergyF(benchmark::State& state) {
  const TorusGrid grid(static_cast<int>(state.range(0)));
  const auto x = random_start(grid, 3, 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(energy_F(grid, x));
}
BENCHMARK(BM_EnergyF)->Arg(6)->Arg(16)->Arg(64);

static void BM_GradF(benchmark::State& state) {
  const TorusGrid grid(static_cast<int>(state.range(0)));
  const auto x = random_start(grid, 3, 5.0);
  std::vector<double> g(x.size());
  for (auto _ : state) {
    grad_F(grid, x, g);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_GradF)->Arg(6)->Arg(16)->Arg(64);

static void BM_MinimizeEnergy(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto opts = default_energy_options(N);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(minimize_energy(N, seed++, 5.0, opts).final_value);
}
BENCHMARK(BM_MinimizeEnergy)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_IntegralLSampled(benchmark::State& state) {
  Rng rng(5);
  const auto g = random_sampled_profile(rng);
  for (auto _ : state) benchmark::DoNotOptimize(integral_L_stretch(g));
}
BENCHMARK(BM_IntegralLSampled);

static void BM_Identity12b(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(check_identity_12b({0.7, 0.2}, {1.3, -0.4}, 3.0).lhs);
}
BENCHMARK(BM_Identity12b);

static void BM_HarmonicFamily(benchmark::State& state) {
  Rng rng(6);
  const auto f = random_harmonic_instance(rng);
  const Exponent p(3.0);
  for (auto _ : state) benchmark::DoNotOptimize(harmonic_family_integral(f.g, f.h, p));
}
BENCHMARK(BM_HarmonicFamily)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
