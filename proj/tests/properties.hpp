// Property cases over simulate and profit: a hand-rolled random instance and
// schedule generator plus a reference walker written without the library's
// metric or simulator. Shared by the unit suite and the acceptance binary.
#ifndef EVOP_TESTS_PROPERTIES_HPP
#define EVOP_TESTS_PROPERTIES_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "evop/ea.hpp"
#include "evop/simulate.hpp"
#include "helpers.hpp"

namespace fixtures {

struct RefStep {
    double arrival, start, depart, b_in, b_out, money;
};

struct RefResult {
    std::vector<RefStep> steps;
    double terminal = 0, arrival_home = 0;
    std::optional<std::pair<Violation, int>> error;
};

inline double ref_km(const Location& a, const Location& b) {
    const double rad = std::numbers::pi / 180.0;
    const double s1 = std::sin((b.lat - a.lat) * rad / 2), s2 = std::sin((b.lon - a.lon) * rad / 2);
    const double h = s1 * s1 + std::cos(a.lat * rad) * std::cos(b.lat * rad) * s2 * s2;
    return 2 * 6371.0 * std::asin(std::min(1.0, std::sqrt(h)));
}

/// Walks the route the long way round: one slot at a time at stations.
inline RefResult reference_walk(const Schedule& s, const Instance& inst) {
    constexpr double tol = 1e-6;
    RefResult r;
    const auto& ev = inst.query.ev;
    const double detour = inst.travel.detour_factor, speed = inst.travel.avg_speed_kmh;
    const double slot_len = inst.horizon.slot_minutes;
    const int n_slots = 1440 / inst.horizon.slot_minutes;
    Location at = inst.query.source;
    double t = 0, b = ev.initial_soc;
    std::vector<bool> done(inst.orders.size(), false);
    auto drive = [&](const Location& to, double& time, double& batt) {
        const double km = ref_km(at, to) * detour;
        time += km / speed * 60.0;
        batt -= ev.efficiency * km;
    };

    for (int i = 0; i < static_cast<int>(s.size()); ++i) {
        const Action& a = s.actions[i];
        RefStep st{};
        double time = t, batt = b;
        if (a.kind == ActionKind::serve) {
            if (a.target < 0 || a.target >= static_cast<int>(inst.orders.size())) {
                r.error = {Violation::invalid_action, i};
                return r;
            }
            if (done[a.target]) {
                r.error = {Violation::duplicate_order, a.target};
                return r;
            }
            done[a.target] = true;
            const Order& o = inst.orders[a.target];
            drive(o.pickup, time, batt);
            st.arrival = time;
            st.b_in = batt;
            st.start = std::max(std::max(time, o.window_start), inst.query.work_start);
            st.depart = st.start + o.service_time;
            if (st.depart > o.window_end + tol) {  // start <= depart, so this covers both ends
                r.error = {Violation::window_violated, a.target};
                return r;
            }
            if (st.depart > inst.query.work_end + tol) {
                r.error = {Violation::outside_working_hours, i};
                return r;
            }
            st.b_out = batt - ev.efficiency * o.service_distance;
            if (st.b_out < -tol) {
                r.error = {Violation::battery_underflow, i};
                return r;
            }
            st.money = o.fare;
            at = o.dropoff;
        } else {
            const bool bad_station = a.target < 0 || a.target >= static_cast<int>(inst.stations.size());
            if (bad_station || a.slot_begin < 0 || a.slot_end > n_slots || a.slot_end <= a.slot_begin) {
                r.error = {Violation::invalid_action, i};
                return r;
            }
            const Station& sta = inst.stations[a.target];
            drive(sta.location, time, batt);
            st.arrival = time;
            st.b_in = batt;
            if (batt < -tol) {
                r.error = {Violation::battery_underflow, i};
                return r;
            }
            st.start = a.slot_begin * slot_len;
            st.depart = a.slot_end * slot_len;
            if (st.arrival > st.start + tol) {
                r.error = {Violation::arrived_after_slot, i};
                return r;
            }
            const bool home = sta.kind != StationKind::grid_station;
            if (!home && (st.start < inst.query.work_start - tol || st.depart > inst.query.work_end + tol)) {
                r.error = {Violation::outside_working_hours, i};
                return r;
            }
            const double e = sta.power_kw * slot_len / 60.0;
            for (int k = a.slot_begin; k < a.slot_end; ++k) {
                if (a.kind == ActionKind::charge) {
                    batt += e;
                    st.money -= sta.tariff.charge_price[k] * e;
                } else {
                    batt -= e;
                    st.money += sta.tariff.discharge_price[k] * e;
                }
            }
            st.b_out = batt;
            if (a.kind == ActionKind::charge && batt > ev.capacity + tol) {
                r.error = {Violation::battery_overflow, i};
                return r;
            }
            if (a.kind == ActionKind::discharge && batt < -tol) {
                r.error = {Violation::battery_underflow, i};
                return r;
            }
            at = sta.location;
        }
        t = st.depart;
        b = st.b_out;
        r.steps.push_back(st);
    }
    const int last = static_cast<int>(s.size());
    drive(inst.query.destination, t, b);
    r.arrival_home = t;
    r.terminal = b;
    if (b < -tol) r.error = {Violation::battery_underflow, last};
    else if (t > 1440 + tol) r.error = {Violation::outside_working_hours, last};
    else if (b < ev.final_soc_min - tol) r.error = {Violation::final_soc_shortfall, last};
    return r;
}

/// Random instance: 0-6 orders, 0-3 grid stations, random slot length, battery and tariffs.
inline Instance random_instance(Rng& rng) {
    static const std::array<int, 5> slot_choices{15, 20, 30, 60, 120};
    const int slot = slot_choices[uniform_int(rng, 0, 4)];
    Instance inst = base_instance(slot);
    inst.name = "prop";
    auto& q = inst.query;
    q.work_start = uniform_real(rng, 300, 700);
    q.work_end = std::min(1440.0, q.work_start + uniform_real(rng, 240, 720));
    q.ev.capacity = uniform_real(rng, 10, 80);
    q.ev.initial_soc = q.ev.capacity * uniform_real(rng, 0.05, 1.0);
    q.ev.final_soc_min = q.ev.initial_soc * uniform_real(rng, 0.0, 0.6);
    if (coin(rng, 0.3)) {
        q.destination = moved(kHome, uniform_real(rng, -10, 10), uniform_real(rng, -10, 10));
        inst.stations[1].location = q.destination;
    }
    auto random_tariff = [&] {
        Tariff t;
        for (int k = 0; k < inst.horizon.slot_count(); ++k) {
            t.charge_price.push_back(uniform_real(rng, 0.05, 0.6));
            t.discharge_price.push_back(uniform_real(rng, 0.0, 0.6));
        }
        return t;
    };
    static const std::array<double, 5> powers{3.7, 7, 11, 22, 50};
    for (auto& st : inst.stations) {
        st.tariff = random_tariff();
        st.power_kw = powers[uniform_int(rng, 0, 2)];
    }
    const int n_stations = uniform_int(rng, 0, 3);
    for (int c = 0; c < n_stations; ++c) {
        const int id = static_cast<int>(inst.stations.size());
        inst.stations.push_back({id, moved(kHome, uniform_real(rng, -12, 12), uniform_real(rng, -12, 12)),
                                 powers[uniform_int(rng, 0, 4)], random_tariff(), StationKind::grid_station});
    }
    const int n_orders = uniform_int(rng, 0, 6);
    for (int o = 0; o < n_orders; ++o) {
        const Location p = moved(kHome, uniform_real(rng, -15, 15), uniform_real(rng, -15, 15));
        const Location d = moved(p, uniform_real(rng, -8, 8), uniform_real(rng, -8, 8));
        const double km = ref_km(p, d) * 1.3 * uniform_real(rng, 1.0, 1.5) + 0.1;
        const double minutes = km / 40 * 60;
        const double ws = uniform_real(rng, q.work_start - 20, q.work_end - 5);
        inst.orders.push_back({o, p, d, uniform_real(rng, 1, 40), km, minutes, ws, ws + minutes + uniform_real(rng, 25, 180)});
    }
    inst.finalize();
    return inst;
}

inline Action random_action(const Instance& inst, Rng& rng) {
    const int slots = inst.horizon.slot_count();
    if (coin(rng, 0.5)) return Action::serve(uniform_int(rng, -1, static_cast<int>(inst.orders.size())));
    const int st = coin(rng, 0.05) ? static_cast<int>(inst.stations.size()) : uniform_int(rng, 0, static_cast<int>(inst.stations.size()) - 1);
    const int b = uniform_int(rng, coin(rng, 0.05) ? -1 : 0, slots - 1);
    const int e = b + uniform_int(rng, coin(rng, 0.05) ? -1 : 1, 6);
    return coin(rng, 0.5) ? Action::charge(st, b, e) : Action::discharge(st, b, e);
}

/// Mix of chromosomes (mostly feasible), perturbed chromosomes and random sequences.
inline Schedule random_schedule(const Instance& inst, Rng& rng) {
    const int mode = uniform_int(rng, 0, 2);
    if (mode == 2) {
        Schedule s;
        const int len = uniform_int(rng, 0, 6);
        for (int i = 0; i < len; ++i) s.actions.push_back(random_action(inst, rng));
        return s;
    }
    Schedule s = generate_chromosome(inst, 3, rng);
    if (mode == 1 && !s.empty()) {
        const int i = uniform_int(rng, 0, static_cast<int>(s.size()) - 1);
        switch (uniform_int(rng, 0, 3)) {
            case 0: s.actions[i] = random_action(inst, rng); break;
            case 1: s.actions.insert(s.actions.begin() + i, random_action(inst, rng)); break;
            case 2: s.actions.erase(s.actions.begin() + i); break;
            default: std::swap(s.actions[i], s.actions[uniform_int(rng, 0, static_cast<int>(s.size()) - 1)]);
        }
    }
    return s;
}

struct PropertyOutcome {
    int cases = 0;
    int feasible = 0;
    std::array<int, 8> violations{};  // hits per Violation kind
    std::vector<std::string> failures;
};

/// Checks one schedule; failure messages go to `out`.
inline void check_case(const Instance& inst, const Schedule& s, int id, PropertyOutcome& out) {
    constexpr double eps = 1e-7;
    auto fail = [&](const std::string& what) {
        if (out.failures.size() < 20) out.failures.push_back("case " + std::to_string(id) + ": " + what);
    };
    ++out.cases;
    const SimResult a = simulate(s, inst);
    const SimResult again = simulate(s, inst);
    if (a.trace != again.trace || a.error != again.error) fail("simulate is not deterministic");

    const RefResult ref = reference_walk(s, inst);
    if (a.feasible() != !ref.error.has_value()) {
        fail("feasibility differs from the reference walker");
        return;
    }
    if (!a.feasible()) {
        ++out.violations[static_cast<int>(a.error->kind)];
        if (a.error->kind != ref.error->first || a.error->index != ref.error->second)
            fail("error " + a.error->describe() + " differs from the reference");
        try {
            (void)profit(s, inst);
            fail("profit accepted an infeasible schedule");
        } catch (const InfeasibleSchedule& e) {
            if (!(e.why() == *a.error)) fail("profit reported a different violation");
        }
        return;
    }

    ++out.feasible;
    const auto& ev = inst.query.ev;
    if (a.trace.steps.size() != s.size() || ref.steps.size() != s.size()) {
        fail("trace length");
        return;
    }
    double sum = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const ActionTrace& st = a.trace.steps[i];
        const RefStep& rs = ref.steps[i];
        if (st.battery_in < -1e-6 || st.battery_out < -1e-6 || st.battery_in > ev.capacity + 1e-6 ||
            st.battery_out > ev.capacity + 1e-6)
            fail("battery out of bounds at action " + std::to_string(i));
        if (std::abs(st.arrival - rs.arrival) > eps || std::abs(st.start - rs.start) > eps ||
            std::abs(st.depart - rs.depart) > eps || std::abs(st.battery_in - rs.b_in) > eps ||
            std::abs(st.battery_out - rs.b_out) > eps || std::abs(st.money_delta - rs.money) > eps)
            fail("step " + std::to_string(i) + " differs from the reference");
        if (st.depart + 1e-9 < st.start || st.start + 1e-9 < st.arrival) fail("time runs backwards");
        sum += rs.money;
    }
    if (a.trace.terminal_battery < ev.final_soc_min - 1e-6) fail("terminal battery below the minimum");
    if (std::abs(a.trace.terminal_battery - ref.terminal) > eps) fail("terminal battery differs");
    const Money p = profit(s, inst);
    if (std::abs(p - sum) > 1e-6) fail("profit differs from the sum of the walk");
    if (std::abs(p - a.trace.total_money()) > 1e-12) fail("profit differs from the trace sum");
    if (std::abs(profit_breakdown(s, inst).total() - p) > 1e-9) fail("breakdown does not add up");
}

inline PropertyOutcome run_properties(int cases, std::uint64_t seed) {
    PropertyOutcome out;
    Rng rng(seed);
    Instance inst;
    for (int i = 0; i < cases; ++i) {
        if (i % 20 == 0) inst = random_instance(rng);
        check_case(inst, random_schedule(inst, rng), i, out);
    }
    return out;
}

}  // namespace fixtures

#endif  // EVOP_TESTS_PROPERTIES_HPP
