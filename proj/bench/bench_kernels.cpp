// Parallel kernels against their serial reference implementations.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "mcd/closed_loop.hpp"
#include "mcd/freqresp.hpp"
#include "mcd/hinf.hpp"
#include "mcd/workflow.hpp"

using namespace mcd;

namespace {

StateSpace random_system(Index n) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(n));
    std::normal_distribution<double> d(0.0, 1.0);
    auto draw = [&](Index r, Index c) {
        Matrix m(r, c);
        for (Index i = 0; i < r; ++i) {
            for (Index j = 0; j < c; ++j) {
                m(i, j) = d(rng);
            }
        }
        return m;
    };
    const Matrix q = draw(n, n);
    const double abscissa = Eigen::EigenSolver<Matrix>(q).eigenvalues().real().maxCoeff();
    return StateSpace(q - (abscissa + 0.5) * Matrix::Identity(n, n), draw(n, 3), draw(3, n), draw(3, 3));
}

const std::vector<double>& hz_grid() {
    static const std::vector<double> g = logspace(0.01, 100.0, 2000);
    return g;
}

std::vector<double> omega_grid() {
    std::vector<double> w = hz_grid();
    for (double& x : w) {
        x *= kTwoPi;
    }
    return w;
}

void BM_FreqResponseParallel(benchmark::State& state) {
    const StateSpace g = random_system(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(freq_response(g, hz_grid()));
    }
}

void BM_FreqResponseSerial(benchmark::State& state) {
    const StateSpace g = random_system(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(freq_response_serial(g, hz_grid()));
    }
}

void BM_PeakGainParallel(benchmark::State& state) {
    const StateSpace g = random_system(state.range(0));
    const std::vector<double> w = omega_grid();
    for (auto _ : state) {
        benchmark::DoNotOptimize(peak_gain_grid(g, w));
    }
}

void BM_PeakGainSerial(benchmark::State& state) {
    const StateSpace g = random_system(state.range(0));
    const std::vector<double> w = omega_grid();
    for (auto _ : state) {
        benchmark::DoNotOptimize(peak_gain_grid_serial(g, w));
    }
}

void BM_HinfNorm(benchmark::State& state) {
    const StateSpace g = random_system(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(hinf_norm(g));
    }
}

void BM_GridCertificateTwoMass(benchmark::State& state) {
    const DesignContext ctx = prepare(default_config("two_mass"));
    const SynthesisProblem pr = make_problem(ctx, BlockPattern::kSix);
    const ControllerBinding b = bind_controller(pr, initial_params(ctx, pr), true);
    for (auto _ : state) {
        benchmark::DoNotOptimize(grid_stability_check(pr, b));
    }
}

}  // namespace

BENCHMARK(BM_FreqResponseParallel)->Arg(10)->Arg(40);
BENCHMARK(BM_FreqResponseSerial)->Arg(10)->Arg(40);
BENCHMARK(BM_PeakGainParallel)->Arg(10)->Arg(40);
BENCHMARK(BM_PeakGainSerial)->Arg(10)->Arg(40);
BENCHMARK(BM_HinfNorm)->Arg(10)->Arg(40);
BENCHMARK(BM_GridCertificateTwoMass);

BENCHMARK_MAIN();
