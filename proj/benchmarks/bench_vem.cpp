#include <msbm/model.hpp>
#include <msbm/simulate.hpp>
#include <msbm/vem.hpp>

#include <benchmark/benchmark.h>

using namespace msbm;

namespace {

SbmSample planted(std::size_t n, int Q, int K)
{
    return sample_sbm(random_block_parameters(Q, K, 1), n, 2);
}

void BM_EStep(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const int Q = static_cast<int>(state.range(1));
    const auto sample = planted(n, Q, 2);
    const auto tau = VariationalPosterior::from_assignment(sample.truth, Q, 0.8);
    const auto theta = m_step(sample.graph, tau).theta;
    FitConfig config;
    config.fixed_point_max = 1;
    for (auto _ : state) benchmark::DoNotOptimize(e_step(sample.graph, theta, tau, config));
    state.SetComplexityN(state.range(0));
}

void BM_MStep(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const int Q = static_cast<int>(state.range(1));
    const auto sample = planted(n, Q, 2);
    const auto tau = VariationalPosterior::from_assignment(sample.truth, Q, 0.8);
    for (auto _ : state) benchmark::DoNotOptimize(m_step(sample.graph, tau));
    state.SetComplexityN(state.range(0));
}

void BM_Elbo(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const int Q = static_cast<int>(state.range(1));
    const auto sample = planted(n, Q, 2);
    const auto tau = VariationalPosterior::from_assignment(sample.truth, Q, 0.8);
    const auto theta = m_step(sample.graph, tau).theta;
    for (auto _ : state) benchmark::DoNotOptimize(elbo(sample.graph, tau, theta));
}

void BM_Fit(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto sample = planted(n, 3, 2);
    FitConfig config;
    config.restarts = 1;
    for (auto _ : state) benchmark::DoNotOptimize(fit(sample.graph, 3, config));
}

} // namespace

BENCHMARK(BM_EStep)->ArgsProduct({{100, 200, 400}, {2, 4}})->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK(BM_MStep)->ArgsProduct({{100, 200, 400}, {2, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Elbo)->ArgsProduct({{100, 400}, {2, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Fit)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
