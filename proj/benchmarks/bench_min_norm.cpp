#include "vodiag/min_norm.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace vodiag;

namespace {

Polytope random_polytope(int n, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<Eigen::VectorXd> verts;
    for (int j = 0; j < count; ++j) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = unif(rng) + 0.3;
        verts.push_back(std::move(v));
    }
    return Polytope(verts);
}

Cone random_cone(int n, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<Eigen::VectorXd> rays;
    for (int j = 0; j < count; ++j) {
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i) r[i] = unif(rng);
        if (r.norm() > 1e-6) rays.push_back(r.normalized());
    }
    return Cone(rays);
}

} // namespace

static void MinNormVertices(benchmark::State& state) {
    const auto polytope = random_polytope(4, static_cast<int>(state.range(0)), 11);
    for (auto _ : state) {
        auto res = min_norm_point(polytope, Cone{}, 1e-9);
        benchmark::DoNotOptimize(res.value);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(MinNormVertices)->RangeMultiplier(2)->Range(4, 256)->Complexity();

static void MinNormWithRays(benchmark::State& state) {
    const auto polytope = random_polytope(4, 16, 13);
    const auto cone = random_cone(4, static_cast<int>(state.range(0)), 17);
    for (auto _ : state) {
        auto res = min_norm_point(polytope, cone, 1e-9);
        benchmark::DoNotOptimize(res.value);
    }
}
BENCHMARK(MinNormWithRays)->DenseRange(1, 6);

BENCHMARK_MAIN();
