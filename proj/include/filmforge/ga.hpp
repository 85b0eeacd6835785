#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "filmforge/environment.hpp"
#include "filmforge/optics.hpp"

namespace filmforge {

struct GaConfig {
    int population_size = 50;
    int generations = 200;
    double crossover_rate = 0.9;
    double mutation_rate = 0.1;      // per gene
    double mutation_sigma_nm = 5.0;  // additive Gaussian, clamped to bounds
    int elitism_count = 2;
    double min_thickness_nm = 0.0;
    double max_thickness_nm = 500.0;
    std::uint64_t seed = 0;
    // When set, the run stops before any generation whose evaluations
    // would exceed this budget; used to match the DQN's evaluation count.
    std::optional<std::uint64_t> max_evaluations;
};

struct GaResult {
    std::vector<double> best_thicknesses_nm;
    double best_aim = 0.0;
    SpectralResponse best_spectrum;
    std::uint64_t evaluations = 0;
    std::vector<ConvergencePoint> curve;  // one point per evaluated generation
};

// Fitness of each chromosome (aim value of its stack). The parallel path
// writes each slot independently and is bit-identical to the serial one;
// exposed for the kernel benchmark and its equivalence test.
std::vector<double> evaluate_population(const StackDesign& stack_template, Band band,
                                        int grid_points, const AimWeights& weights,
                                        const std::vector<std::vector<double>>& population,
                                        bool parallel);

// Real-valued GA over free-layer thicknesses: chromosome 0 starts from the
// template's thicknesses, the rest uniform in bounds; tournament selection
// of size 3, uniform crossover, per-gene Gaussian mutation, elitism.
// Fixed seed gives an identical run; the best-ever individual is tracked
// with earliest-generation tie-breaking.
GaResult run_ga(const StackDesign& stack_template, Band band, int grid_points,
                const AimWeights& weights, const GaConfig& config);

}  // namespace filmforge
