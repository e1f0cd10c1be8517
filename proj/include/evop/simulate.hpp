#ifndef EVOP_SIMULATE_HPP
#define EVOP_SIMULATE_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "evop/model.hpp"

namespace evop {

enum class Violation {
    window_violated,        // index = order id
    battery_underflow,      // index = action index (size() for the leg to the destination)
    battery_overflow,
    arrived_after_slot,
    outside_working_hours,  // also used when the destination is reached after midnight
    final_soc_shortfall,
    duplicate_order,        // index = order id
    invalid_action,         // unknown target or malformed slot interval
};

std::string to_string(Violation v);

struct Infeasibility {
    Violation kind;
    int index = -1;

    std::string describe() const;
    friend bool operator==(const Infeasibility&, const Infeasibility&) = default;
};

struct ActionTrace {
    Minutes arrival = 0.0;
    Minutes start = 0.0;  // pickup time, or slot_begin boundary
    Minutes depart = 0.0;
    Kwh battery_in = 0.0;   // on arrival, after the approach leg
    Kwh battery_out = 0.0;  // on departure
    Money money_delta = 0.0;

    friend bool operator==(const ActionTrace&, const ActionTrace&) = default;
};

struct Trace {
    std::vector<ActionTrace> steps;
    Minutes arrival_at_destination = 0.0;
    Kwh terminal_battery = 0.0;

    Money total_money() const;
    friend bool operator==(const Trace&, const Trace&) = default;
};

struct SimResult {
    Trace trace;
    std::optional<Infeasibility> error;

    bool feasible() const { return !error.has_value(); }
};

/// Walks the schedule from the source at minute 0 with the initial battery.
/// Non-home actions cannot start before the working hours; travel outside
/// them is allowed. Stops at the first violated constraint.
SimResult simulate(const Schedule& s, const Instance& inst);

class InfeasibleSchedule : public std::runtime_error {
public:
    explicit InfeasibleSchedule(Infeasibility why);
    const Infeasibility& why() const { return why_; }

private:
    Infeasibility why_;
};

struct ProfitBreakdown {
    Money orders = 0.0;
    Money v2g = 0.0;  // discharge revenue minus charge cost

    Money total() const { return orders + v2g; }
};

/// Sum of the trace money deltas. Throws InfeasibleSchedule.
Money profit(const Schedule& s, const Instance& inst);
ProfitBreakdown profit_breakdown(const Schedule& s, const Instance& inst);

}  // namespace evop

#endif  // EVOP_SIMULATE_HPP
