#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "filmforge/agent.hpp"
#include "filmforge/config.hpp"
#include "filmforge/ga.hpp"

namespace filmforge {

// Atomic text write: the content lands under a temporary name in the
// target directory and is renamed into place, so readers never observe a
// partial file. Output bytes contain nothing run-dependent (no clocks,
// no hostnames): identical inputs give identical files.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

// Uniform view of one optimizer run for reporting.
struct RunSummary {
    std::string optimizer;  // "dqn" or "ga"
    std::uint64_t seed = 0;
    int rounds = 0;  // episodes (dqn) or generations actually evaluated (ga)
    std::uint64_t total_steps = 0;  // dqn only; 0 for ga
    std::uint64_t aim_evaluations = 0;
    std::vector<double> best_thicknesses_nm;
    double best_aim = 0.0;
    SpectralResponse best_spectrum;
    std::vector<ConvergencePoint> curve;
};

RunSummary summarize(const AgentRunReport& report, int episodes);
RunSummary summarize(const GaResult& result, std::uint64_t seed);

std::string report_json(const RunSummary& run, const ProblemConfig& config);
std::string convergence_csv(const RunSummary& run);

// Runs one optimizer on an already-loaded problem. For "ga",
// `max_evaluations` caps the budget when set.
RunSummary run_optimizer(const LoadedProblem& problem, const std::string& optimizer,
                         std::uint64_t seed, std::optional<std::uint64_t> max_evaluations = {});

struct CompareSide {
    bool failed = false;
    std::string error;
    double best_aim = 0.0;
    double mean_R = 0.0;
    double mean_T = 0.0;
    std::uint64_t aim_evaluations = 0;
};

struct CompareRow {
    std::uint64_t seed = 0;
    CompareSide a, b;
};

struct CompareResult {
    std::string optimizer_a, optimizer_b;
    std::vector<CompareRow> rows;
    // Medians over the seeds where the side succeeded.
    double median_a_best_aim = 0.0, median_a_mean_R = 0.0;
    double median_b_best_aim = 0.0, median_b_mean_R = 0.0;
};

// Runs both optimizers on every seed. When side A is the DQN and side B
// the GA, B's evaluation budget is capped to A's evaluation count so the
// comparison is budget-matched. A failure on one side is recorded in its
// row; remaining seeds still run.
CompareResult run_compare(const LoadedProblem& problem, const std::vector<std::uint64_t>& seeds,
                          const std::string& optimizer_a, const std::string& optimizer_b);

std::string compare_csv(const CompareResult& result);

double median(std::vector<double> values);

}  // namespace filmforge
