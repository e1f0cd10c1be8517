#include "evop/simulate.hpp"

#include <algorithm>

#include "evop/metric.hpp"

namespace evop {

namespace {
constexpr double kTimeTol = 1e-6;
}

std::string to_string(Violation v) {
    switch (v) {
        case Violation::window_violated: return "WindowViolated";
        case Violation::battery_underflow: return "BatteryUnderflow";
        case Violation::battery_overflow: return "BatteryOverflow";
        case Violation::arrived_after_slot: return "ArrivedAfterSlot";
        case Violation::outside_working_hours: return "OutsideWorkingHours";
        case Violation::final_soc_shortfall: return "FinalSocShortfall";
        case Violation::duplicate_order: return "DuplicateOrder";
        case Violation::invalid_action: return "InvalidAction";
    }
    return "Unknown";
}

std::string Infeasibility::describe() const {
    switch (kind) {
        case Violation::window_violated:
        case Violation::duplicate_order: return to_string(kind) + "(order " + std::to_string(index) + ")";
        case Violation::final_soc_shortfall: return to_string(kind);
        default: return to_string(kind) + "(action " + std::to_string(index) + ")";
    }
}

Money Trace::total_money() const {
    Money sum = 0.0;
    for (const auto& st : steps) sum += st.money_delta;
    return sum;
}

SimResult simulate(const Schedule& s, const Instance& inst) {
    SimResult out;
    const auto& ev = inst.query.ev;
    const int slots = inst.horizon.slot_count();
    const Minutes work_start = inst.query.work_start;
    const Minutes work_end = inst.query.work_end;

    Minutes now = 0.0;
    Kwh battery = ev.initial_soc;
    const Location* here = &inst.query.source;
    std::vector<char> served(inst.orders.size(), 0);
    out.trace.steps.reserve(s.size());

    auto fail = [&](Violation v, int idx) {
        out.error = Infeasibility{v, idx};
        return out;
    };

    for (std::size_t i = 0; i < s.actions.size(); ++i) {
        const Action& a = s.actions[i];
        const int idx = static_cast<int>(i);
        ActionTrace step;

        if (a.is_serve()) {
            if (a.target < 0 || a.target >= static_cast<int>(inst.orders.size())) return fail(Violation::invalid_action, idx);
            if (served[a.target]) return fail(Violation::duplicate_order, a.target);
            served[a.target] = 1;
            const Order& o = inst.orders[a.target];
            const Leg leg = travel(*here, o.pickup, inst);
            step.arrival = now + leg.time;
            step.battery_in = battery - energy(leg.distance, ev);
            step.start = std::max({step.arrival, o.window_start, work_start});
            step.depart = step.start + o.service_time;
            if (step.start > o.window_end + kTimeTol || step.depart > o.window_end + kTimeTol)
                return fail(Violation::window_violated, a.target);
            if (step.depart > work_end + kTimeTol) return fail(Violation::outside_working_hours, idx);
            step.battery_out = step.battery_in - energy(o.service_distance, ev);
            if (step.battery_out < -kBatteryTol) return fail(Violation::battery_underflow, idx);
            step.money_delta = o.fare;
            here = &o.dropoff;
        } else {
            if (a.target < 0 || a.target >= static_cast<int>(inst.stations.size()) || a.slot_begin < 0 ||
                a.slot_end > slots || a.slot_begin >= a.slot_end)
                return fail(Violation::invalid_action, idx);
            const Station& st = inst.stations[a.target];
            const Leg leg = travel(*here, st.location, inst);
            step.arrival = now + leg.time;
            step.battery_in = battery - energy(leg.distance, ev);
            if (step.battery_in < -kBatteryTol) return fail(Violation::battery_underflow, idx);
            step.start = inst.horizon.slot_start(a.slot_begin);
            step.depart = inst.horizon.slot_start(a.slot_end);
            if (step.arrival > step.start + kTimeTol) return fail(Violation::arrived_after_slot, idx);
            if (!st.is_home() && (step.start < work_start - kTimeTol || step.depart > work_end + kTimeTol))
                return fail(Violation::outside_working_hours, idx);
            const Kwh per_slot = slot_energy(st, inst.horizon);
            const auto& prices = a.kind == ActionKind::charge ? st.tariff.charge_price : st.tariff.discharge_price;
            double price_sum = 0.0;
            for (int k = a.slot_begin; k < a.slot_end; ++k) price_sum += prices[k];
            const Kwh moved = per_slot * a.slots();
            if (a.kind == ActionKind::charge) {
                step.battery_out = step.battery_in + moved;
                if (step.battery_out > ev.capacity + kBatteryTol) return fail(Violation::battery_overflow, idx);
                step.money_delta = -price_sum * per_slot;
            } else {
                step.battery_out = step.battery_in - moved;
                if (step.battery_out < -kBatteryTol) return fail(Violation::battery_underflow, idx);
                step.money_delta = price_sum * per_slot;
            }
            here = &st.location;
        }
        // Charge and discharge never overlap: every interval starts after the previous departure.
        if (step.start + kTimeTol < now && a.is_energy()) return fail(Violation::arrived_after_slot, idx);
        now = step.depart;
        battery = step.battery_out;
        out.trace.steps.push_back(step);
    }

    const int last = static_cast<int>(s.size());
    const Leg home = travel(*here, inst.query.destination, inst);
    out.trace.arrival_at_destination = now + home.time;
    out.trace.terminal_battery = battery - energy(home.distance, ev);
    if (out.trace.terminal_battery < -kBatteryTol) return fail(Violation::battery_underflow, last);
    if (out.trace.arrival_at_destination > kMinutesPerDay + kTimeTol) return fail(Violation::outside_working_hours, last);
    if (out.trace.terminal_battery < ev.final_soc_min - kBatteryTol) return fail(Violation::final_soc_shortfall, last);
    return out;
}

InfeasibleSchedule::InfeasibleSchedule(Infeasibility why)
    : std::runtime_error("infeasible schedule: " + why.describe()), why_(why) {}

Money profit(const Schedule& s, const Instance& inst) {
    SimResult r = simulate(s, inst);
    if (!r.feasible()) throw InfeasibleSchedule(*r.error);
    return r.trace.total_money();
}

ProfitBreakdown profit_breakdown(const Schedule& s, const Instance& inst) {
    SimResult r = simulate(s, inst);
    if (!r.feasible()) throw InfeasibleSchedule(*r.error);
    ProfitBreakdown p;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.actions[i].is_serve())
            p.orders += r.trace.steps[i].money_delta;
        else
            p.v2g += r.trace.steps[i].money_delta;
    }
    return p;
}

}  // namespace evop
