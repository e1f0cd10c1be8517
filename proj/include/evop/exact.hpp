#ifndef EVOP_EXACT_HPP
#define EVOP_EXACT_HPP

#include <cstddef>

#include "evop/model.hpp"
#include "evop/report.hpp"
#include "evop/route_dp.hpp"

namespace evop {

struct ExactCaps {
    int max_orders = 8;
    int max_station_nodes = 3;  // grid stations; the two homes are always allowed
    int revisits = 2;           // extra visits per station beyond the first
    double battery_resolution = 0.05;
    bool bound_pruning = true;
    bool dominance_pruning = true;
    std::size_t max_states = 50'000'000;
};

/// Depth-first branch and bound over sequences of orders and station visits.
/// Each node extends the label frontier of its parent, so every prefix is
/// also evaluated as a complete route. Throws CapExceeded.
SolverReport solve_exact(const Instance& inst, const ExactCaps& caps = {});

struct BruteForceCaps {
    int max_orders = 4;
    int max_slots = 16;  // longest single charge/discharge interval worth enumerating
    int revisits = 2;
    std::size_t max_nodes = 2'000'000'000;
};

/// Exhaustive enumeration of every action sequence within the caps. Shares
/// no search code with solve_exact. Throws CapExceeded.
SolverReport brute_force_reference(const Instance& inst, const BruteForceCaps& caps = {});

}  // namespace evop

#endif  // EVOP_EXACT_HPP
