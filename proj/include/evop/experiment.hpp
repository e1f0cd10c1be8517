#ifndef EVOP_EXPERIMENT_HPP
#define EVOP_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "evop/ea.hpp"
#include "evop/exact.hpp"
#include "evop/instance_gen.hpp"
#include "evop/lns.hpp"
#include "evop/model.hpp"
#include "evop/report.hpp"

namespace evop {

/// Solver settings shared by the CLI and the batch harness.
struct SolverSettings {
    EaParams ea;
    LnsParams lns;
    ExactCaps exact;
    int baseline_restarts = 100;
};

/// Runs one algorithm ("bl", "ea", "lns" or "exact") with the given seed and budget.
/// Throws std::invalid_argument on an unknown name.
SolverReport run_solver(const std::string& algo, const Instance& inst, std::uint64_t seed, double time_limit,
                        const SolverSettings& settings = {});

struct ExperimentConfig {
    std::vector<std::filesystem::path> instance_paths;
    std::vector<GenParams> generated;
    std::vector<std::string> algos{"bl", "ea", "lns"};
    int repeats = 10;
    double time_limit_small = 60.0;
    double time_limit_large = 300.0;
    int large_from_orders = 100;  // instances with at least this many orders get the large budget
    std::vector<double> price_factors{1.0};  // scales prices and station power together
    std::vector<double> fare_factors{1.0};
    std::uint64_t seed_base = 1;
    int workers = 1;
    std::filesystem::path out_dir = "results";
    SolverSettings settings;

    void validate() const;
};

struct RunRecord {
    std::string instance;
    std::string algo;
    int repeat = 0;
    std::uint64_t seed = 0;
    double price_factor = 1.0;
    double fare_factor = 1.0;
    double time_limit = 0.0;
    Money total_profit = 0.0;
    Money order_profit = 0.0;
    Money v2g_profit = 0.0;
    double wall_clock_s = 0.0;
    bool feasible = false;
    std::string error;  // empty on success
};

struct Quartiles {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};
/// Linear-interpolation quartiles; all zero for an empty sample.
Quartiles quartiles(std::vector<double> xs);

struct GroupSummary {
    std::string algo;
    double price_factor = 1.0;
    double fare_factor = 1.0;
    int runs = 0;
    int failures = 0;
    Quartiles total;
    Quartiles v2g_share;
};

struct ExperimentResult {
    std::vector<RunRecord> runs;
    std::vector<GroupSummary> groups;
};

/// Every (instance, sweep point, algo, repeat) run. Writes runs.csv, summary.csv,
/// reports/<run>.json and convergence/<run>.csv under out_dir. Errors of a
/// single run land in its CSV row and never stop the batch.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Two-column CSV "elapsed_s,profit" sorted by time.
std::string emit_convergence(const SolverReport& r);
std::vector<ConvergencePoint> parse_convergence(const std::string& csv);

std::string runs_csv(const std::vector<RunRecord>& runs);
std::string summary_csv(const std::vector<GroupSummary>& groups);

}  // namespace evop

#endif  // EVOP_EXPERIMENT_HPP
