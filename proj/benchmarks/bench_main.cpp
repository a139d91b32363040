#include <benchmark/benchmark.h>

#include <array>
#include <cstdint>
#include <vector>

#include "gibbslab/environment.hpp"
#include "gibbslab/exact.hpp"
#include "gibbslab/model.hpp"
#include "gibbslab/rng.hpp"
#include "gibbslab/sampling.hpp"
#include "gibbslab/walk.hpp"

using namespace gibbslab;

static void BM_PhiloxBlock(benchmark::State& state) {
    std::array<std::uint32_t, 4> ctr{0, 0, 0, 0};
    const std::array<std::uint32_t, 2> key{0x12345678u, 0x9abcdef0u};
    for (auto _ : state) {
        ++ctr[0];
        benchmark::DoNotOptimize(Philox4x32::block(ctr, key));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * 16);
}
BENCHMARK(BM_PhiloxBlock);

static void BM_NormalDraws(benchmark::State& state) {
    RngStream rng(7, 0, rng_purpose::environment);
    for (auto _ : state) benchmark::DoNotOptimize(rng.normal());
}
BENCHMARK(BM_NormalDraws);

static void BM_SpinEngine(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto model = ModelSpec::rem(n);
    const auto env = sample_environment(model, 11, 0);
    for (auto _ : state) {
        const ExactGibbs gibbs(model, env, 1.5);
        benchmark::DoNotOptimize(gibbs.mean_overlap());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) << n);
}
BENCHMARK(BM_SpinEngine)->Arg(10)->Arg(14)->Arg(18);

static void BM_MixtureEngine(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto model = ModelSpec::p_spin(n, MixedXi({{2, 0.7071067811865476},
                                                     {3, 0.7071067811865476}}));
    const auto env = sample_environment(model, 13, 0);
    for (auto _ : state) {
        const ExactGibbs gibbs(model, env, 1.0);
        benchmark::DoNotOptimize(gibbs.log_partition());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) << n);
}
BENCHMARK(BM_MixtureEngine)->Arg(8)->Arg(10)->Arg(12);

static void BM_PolymerEngine(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto model = ModelSpec::polymer(n, WalkKernel::simple_random_walk(2));
    const auto env = sample_environment(model, 17, 0);
    for (auto _ : state) {
        const ExactGibbs gibbs(model, env, 1.0);
        benchmark::DoNotOptimize(gibbs.log_partition());
    }
}
BENCHMARK(BM_PolymerEngine)->Arg(8)->Arg(16)->Arg(32);

static void BM_PolymerSampling(benchmark::State& state) {
    const auto model = ModelSpec::polymer(16, WalkKernel::simple_random_walk(2));
    const auto env = sample_environment(model, 19, 0);
    const ExactGibbs gibbs(model, env, 1.0);
    RngStream rng(19, 0, rng_purpose::sampler);
    for (auto _ : state) benchmark::DoNotOptimize(gibbs.sample_path(rng));
}
BENCHMARK(BM_PolymerSampling);

static void BM_SpinSampling(benchmark::State& state) {
    const auto model = ModelSpec::rem(12);
    const auto env = sample_environment(model, 23, 0);
    const ExactGibbs gibbs(model, env, 1.5);
    SamplerConfig cfg{23, 0, 1024};
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_states(gibbs, cfg).states);
        ++cfg.replica_id;
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 1024);
}
BENCHMARK(BM_SpinSampling);

BENCHMARK_MAIN();
