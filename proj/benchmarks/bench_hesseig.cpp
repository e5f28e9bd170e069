#include <benchmark/benchmark.h>

#include <random>

#include "hesseig/dirichlet.hpp"
#include "hesseig/eigensolve.hpp"
#include "hesseig/radial.hpp"
#include "hesseig/symfun.hpp"

namespace {

using namespace hesseig;

void BM_Sigma(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = u(rng);
    const SpectrumPoint p(v);
    for (auto _ : state) benchmark::DoNotOptimize(sigma(p, n / 2));
}
BENCHMARK(BM_Sigma)->Arg(2)->Arg(8)->Arg(32);

void BM_ShootEigen(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(shoot_eigen(3, 2, 0.0, 1.0, 1e-10).lambda1);
}
BENCHMARK(BM_ShootEigen)->Unit(benchmark::kMillisecond);

ProblemSpec spec_of(int k, double h)
{
    ProblemSpec spec;
    spec.k = k;
    spec.h = h;
    return spec;
}

void BM_Poisson(benchmark::State& state)
{
    const ProblemSpec spec = spec_of(1, 1.0 / static_cast<double>(state.range(0)));
    const auto disc = discretization_for(spec.domain, spec.h);
    const GridField one = disc->to_field(Eigen::VectorXd::Ones(disc->unknowns()));
    for (auto _ : state) benchmark::DoNotOptimize(solve_poisson(spec, one));
}
BENCHMARK(BM_Poisson)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_MongeAmpere(benchmark::State& state)
{
    const ProblemSpec spec = spec_of(2, 1.0 / static_cast<double>(state.range(0)));
    const auto disc = discretization_for(spec.domain, spec.h);
    const GridField one = disc->to_field(Eigen::VectorXd::Ones(disc->unknowns()));
    for (auto _ : state) benchmark::DoNotOptimize(solve_monge_ampere_2d(spec, one));
}
BENCHMARK(BM_MongeAmpere)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_FindLambda(benchmark::State& state)
{
    const ProblemSpec spec = spec_of(static_cast<int>(state.range(0)), 1.0 / 32);
    for (auto _ : state) benchmark::DoNotOptimize(find_lambda_delta(spec).lambda_delta);
}
BENCHMARK(BM_FindLambda)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
