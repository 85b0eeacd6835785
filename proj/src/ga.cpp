#include "filmforge/ga.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <utility>

#include "filmforge/errors.hpp"
#include "filmforge/rng.hpp"

namespace filmforge {

namespace {

struct Evaluated {
    double aim;
    double mean_R, mean_T, mean_A;
};

StackDesign with_thicknesses(const StackDesign& stack_template, const std::vector<double>& th) {
    StackDesign stack = stack_template;
    for (std::size_t i = 0; i < th.size(); ++i) stack.layers[i].thickness_nm = th[i];
    return stack;
}

void validate(const StackDesign& stack_template, const GaConfig& c) {
    if (stack_template.layers.empty()) throw ValidationError("ga: stack template has no layers");
    if (c.population_size < 2) throw ValidationError("ga: population_size must be >= 2");
    if (c.generations < 0) throw ValidationError("ga: generations must be >= 0");
    if (c.elitism_count < 0 || c.elitism_count >= c.population_size)
        throw ValidationError("ga: elitism_count must be in [0, population_size)");
    if (!(c.crossover_rate >= 0.0 && c.crossover_rate <= 1.0))
        throw ValidationError("ga: crossover_rate must be in [0, 1]");
    if (!(c.mutation_rate >= 0.0 && c.mutation_rate <= 1.0))
        throw ValidationError("ga: mutation_rate must be in [0, 1]");
    if (!(c.mutation_sigma_nm > 0.0)) throw ValidationError("ga: mutation_sigma_nm must be > 0");
    if (!(c.min_thickness_nm >= 0.0) || !(c.min_thickness_nm < c.max_thickness_nm))
        throw ValidationError("ga: thickness bounds must satisfy 0 <= min < max");
}

// Indices of the population sorted best-first; equal fitness keeps the
// lower index first so elitism and reporting are deterministic.
std::vector<std::size_t> rank(const std::vector<double>& fitness) {
    std::vector<std::size_t> order(fitness.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&fitness](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });
    return order;
}

std::size_t tournament(const std::vector<double>& fitness, Rng& rng) {
    std::size_t best = static_cast<std::size_t>(rng.uniform_int(fitness.size()));
    for (int i = 1; i < 3; ++i) {
        const std::size_t challenger = static_cast<std::size_t>(rng.uniform_int(fitness.size()));
        if (fitness[challenger] > fitness[best] ||
            (fitness[challenger] == fitness[best] && challenger < best))
            best = challenger;
    }
    return best;
}

}  // namespace

std::vector<double> evaluate_population(const StackDesign& stack_template, Band band,
                                        int grid_points, const AimWeights& weights,
                                        const std::vector<std::vector<double>>& population,
                                        bool parallel) {
    std::vector<double> aims(population.size());
    std::exception_ptr failure;
    const auto eval_one = [&](std::size_t i) {
        const SpectralResponse r = spectral_response_serial(
            with_thicknesses(stack_template, population[i]), band, grid_points);
        aims[i] = aim_value(r, weights);
    };
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < population.size(); ++i) {
            try {
                eval_one(i);
            } catch (...) {
#pragma omp critical
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
    } else {
        for (std::size_t i = 0; i < population.size(); ++i) eval_one(i);
    }
    return aims;
}

GaResult run_ga(const StackDesign& stack_template, Band band, int grid_points,
                const AimWeights& weights, const GaConfig& config) {
    validate(stack_template, config);
    const std::size_t genes = stack_template.layers.size();
    const std::size_t pop_size = static_cast<std::size_t>(config.population_size);
    Rng rng(config.seed);

    // Chromosome 0 is the template's own thicknesses (clamped); the rest
    // are uniform over the search box, gene-major draw order.
    std::vector<std::vector<double>> population(pop_size, std::vector<double>(genes));
    for (std::size_t g = 0; g < genes; ++g)
        population[0][g] = std::clamp(stack_template.layers[g].thickness_nm,
                                      config.min_thickness_nm, config.max_thickness_nm);
    for (std::size_t i = 1; i < pop_size; ++i)
        for (std::size_t g = 0; g < genes; ++g)
            population[i][g] = rng.uniform(config.min_thickness_nm, config.max_thickness_nm);

    GaResult result;
    std::vector<Evaluated> details(pop_size);

    const auto evaluate_generation = [&]() {
        std::vector<double> aims;
        std::vector<SpectralResponse> responses(pop_size);
        std::exception_ptr failure;
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < pop_size; ++i) {
            try {
                responses[i] = spectral_response_serial(
                    with_thicknesses(stack_template, population[i]), band, grid_points);
            } catch (...) {
#pragma omp critical
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
        aims.resize(pop_size);
        for (std::size_t i = 0; i < pop_size; ++i) {
            aims[i] = aim_value(responses[i], weights);
            details[i] = {aims[i], responses[i].mean_R, responses[i].mean_T, responses[i].mean_A};
        }
        result.evaluations += pop_size;
        // Best-ever update; strict comparison keeps the earliest holder.
        const std::size_t gen_best =
            static_cast<std::size_t>(std::max_element(aims.begin(), aims.end()) - aims.begin());
        if (result.curve.empty() || aims[gen_best] > result.best_aim) {
            result.best_aim = aims[gen_best];
            result.best_thicknesses_nm = population[gen_best];
            result.best_spectrum = responses[gen_best];
        }
        result.curve.push_back(
            {result.best_aim, result.best_spectrum.mean_A, result.best_spectrum.mean_R});
        return aims;
    };

    std::vector<double> fitness = evaluate_generation();

    for (int gen = 0; gen < config.generations; ++gen) {
        if (config.max_evaluations &&
            result.evaluations + pop_size > *config.max_evaluations)
            break;

        const std::vector<std::size_t> order = rank(fitness);
        std::vector<std::vector<double>> next;
        next.reserve(pop_size);
        for (int e = 0; e < config.elitism_count; ++e)
            next.push_back(population[order[static_cast<std::size_t>(e)]]);

        while (next.size() < pop_size) {
            const std::size_t pa = tournament(fitness, rng);
            const std::size_t pb = tournament(fitness, rng);
            std::vector<double> child = population[pa];
            if (rng.uniform01() < config.crossover_rate)
                for (std::size_t g = 0; g < genes; ++g)
                    if (rng.uniform01() < 0.5) child[g] = population[pb][g];
            for (std::size_t g = 0; g < genes; ++g)
                if (rng.uniform01() < config.mutation_rate)
                    child[g] = std::clamp(child[g] + rng.normal(0.0, config.mutation_sigma_nm),
                                          config.min_thickness_nm, config.max_thickness_nm);
            next.push_back(std::move(child));
        }
        population = std::move(next);
        fitness = evaluate_generation();
    }
    return result;
}

}  // namespace filmforge
