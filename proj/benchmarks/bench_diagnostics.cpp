#include "vodiag/asymptotics.hpp"
#include "vodiag/calculus.hpp"
#include "vodiag/min_norm.hpp"
#include "vodiag/problem_io.hpp"

#include <benchmark/benchmark.h>

using namespace vodiag;

namespace {

Problem sine_problem() { return parse_problem("objectives: [\"sin(x1)\"]\nconstraints: full"); }

Problem pair_problem(int m) {
    std::string doc = "objectives: [\"x1 + x2\"";
    for (int i = 1; i < m; ++i) doc += ", \"x1^2 + " + std::to_string(i) + "*x2\"";
    doc += "]\nconstraints: box [[0, inf], [0, inf]]";
    return parse_problem(doc);
}

} // namespace

static void RabierPatterns(benchmark::State& state) {
    const Problem problem = pair_problem(static_cast<int>(state.range(0)));
    Eigen::VectorXd x(2);
    x << 0.0, 1.0;
    RabierParams params;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rabier_nu(problem, x, params));
    }
}
BENCHMARK(RabierPatterns)->DenseRange(1, 6);

static void SubdiffDepth(benchmark::State& state) {
    // Nested max chain of the requested depth.
    Expression e = Expression::abs(Expression::variable(0));
    for (int d = 1; d < state.range(0); ++d)
        e = Expression::max({e, Expression::variable(0) * Expression::constant(0.5 + d)});
    Eigen::VectorXd x(1);
    x << 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(subdiff(e, x).size());
    }
}
BENCHMARK(SubdiffDepth)->RangeMultiplier(2)->Range(1, 16);

static void GammaResidualEval(benchmark::State& state) {
    const Problem sine = sine_problem();
    Eigen::VectorXd x(1);
    x << 10.0;
    RabierParams params;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gamma_residual(sine, x, params));
    }
}
BENCHMARK(GammaResidualEval);

static void ShellSampling(benchmark::State& state) {
    const Problem sine = sine_problem();
    const auto schedule =
        RadiusSchedule::geometric(1.0, 2.0, 10, static_cast<int>(state.range(0)));
    const SublevelBound ybar(Eigen::VectorXd::Zero(1));
    ProbeParams params;
    for (auto _ : state) {
        benchmark::DoNotOptimize(shell_sampler(sine, ybar, schedule, 1, params).size());
    }
}
BENCHMARK(ShellSampling)->RangeMultiplier(4)->Range(64, 1024);

BENCHMARK_MAIN();
