#ifndef EVOP_BASELINE_HPP
#define EVOP_BASELINE_HPP

#include <cstdint>
#include <stdexcept>

#include "evop/model.hpp"
#include "evop/report.hpp"

namespace evop {

class NoFeasibleSolution : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BaselineParams {
    std::uint64_t seed = 1;
    double charge_threshold = 0.20;  // fraction of capacity
    int max_restarts = 100;
};

/// Greedy construction: next order from the nearest upcoming window, full
/// charge when the battery runs low, discharge at home down to B^d.
SolverReport solve_baseline(const Instance& inst, const BaselineParams& params = {});

}  // namespace evop

#endif  // EVOP_BASELINE_HPP
