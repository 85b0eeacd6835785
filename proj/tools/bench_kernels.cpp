#include <benchmark/benchmark.h>

#include <vector>

#include "filmforge/ga.hpp"
#include "filmforge/materials.hpp"
#include "filmforge/optics.hpp"
#include "filmforge/rng.hpp"

namespace {

using namespace filmforge;

// Absorber-style four-layer stack: dielectric/metal/dielectric over a thick
// copper back-reflector on glass. Representative of the heaviest evaluate
// workload the optimizers generate.
StackDesign make_stack() {
    auto sio2 = make_constant_material("sio2", 1.46, 0.0);
    auto ti = make_constant_material("ti", 2.5, 3.3);
    auto cu = make_constant_material("cu", 0.5, 6.0);
    auto glass = make_constant_material("glass", 1.5, 0.0);

    StackDesign stack;
    stack.layers = {{sio2, 132.4}, {ti, 13.74}, {sio2, 77.5}};
    stack.backing = Layer{cu, 200.0};
    stack.substrate = glass;
    return stack;
}

const Band kBand{300.0, 1500.0};
constexpr int kGridPoints = 601;

void BM_spectral_response_serial(benchmark::State& state) {
    const StackDesign stack = make_stack();
    for (auto _ : state) {
        SpectralResponse r = spectral_response_serial(stack, kBand, kGridPoints);
        benchmark::DoNotOptimize(r.mean_R);
    }
}
BENCHMARK(BM_spectral_response_serial);

void BM_spectral_response_parallel(benchmark::State& state) {
    const StackDesign stack = make_stack();
    for (auto _ : state) {
        SpectralResponse r = spectral_response(stack, kBand, kGridPoints);
        benchmark::DoNotOptimize(r.mean_R);
    }
}
BENCHMARK(BM_spectral_response_parallel);

std::vector<std::vector<double>> make_population(std::size_t pop, std::size_t genes) {
    Rng rng(7);
    std::vector<std::vector<double>> population(pop, std::vector<double>(genes));
    for (auto& individual : population)
        for (double& gene : individual) gene = rng.uniform(0.0, 500.0);
    return population;
}

void BM_evaluate_population_serial(benchmark::State& state) {
    const StackDesign stack = make_stack();
    const auto population = make_population(50, stack.layers.size());
    const AimWeights weights{0.0, -1.0, 1.0};
    for (auto _ : state) {
        auto aims = evaluate_population(stack, kBand, 121, weights, population,
                                        /*parallel=*/false);
        benchmark::DoNotOptimize(aims.data());
    }
}
BENCHMARK(BM_evaluate_population_serial);

void BM_evaluate_population_parallel(benchmark::State& state) {
    const StackDesign stack = make_stack();
    const auto population = make_population(50, stack.layers.size());
    const AimWeights weights{0.0, -1.0, 1.0};
    for (auto _ : state) {
        auto aims = evaluate_population(stack, kBand, 121, weights, population,
                                        /*parallel=*/true);
        benchmark::DoNotOptimize(aims.data());
    }
}
BENCHMARK(BM_evaluate_population_parallel);

}  // namespace

BENCHMARK_MAIN();
