#ifndef EVOP_REPORT_HPP
#define EVOP_REPORT_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "evop/model.hpp"

namespace evop {

struct ConvergencePoint {
    double elapsed_s = 0.0;
    Money profit = 0.0;
};

struct SolverReport {
    std::string algo;
    std::uint64_t seed = 0;
    std::string instance;
    Schedule schedule;
    Money total_profit = 0.0;
    Money order_profit = 0.0;
    Money v2g_profit = 0.0;  // discharge revenue minus charge cost
    std::vector<ConvergencePoint> convergence;
    double wall_clock_s = 0.0;
    bool feasible = false;
    std::optional<Money> dp_bound;
    std::uint64_t iterations = 0;  // generations, LNS iterations or search nodes
};

/// Fills schedule, profits and the feasibility flag from a simulation of `s`.
void set_schedule(SolverReport& r, const Instance& inst, const Schedule& s);

nlohmann::json to_json(const SolverReport& r);
SolverReport report_from_json(const nlohmann::json& j);

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace evop

#endif  // EVOP_REPORT_HPP
