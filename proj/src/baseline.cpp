#include "evop/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "evop/construct.hpp"
#include "evop/metric.hpp"
#include "evop/rng.hpp"

namespace evop {

namespace {

bool try_full_charge(Schedule& s, const Timeline& tl, const Instance& inst, Rng& rng) {
    const std::size_t p = s.size();
    struct Ranked {
        Money score;
        int station;
        SlotWindow w;
    };
    std::vector<Ranked> ranked;
    for (std::size_t c = 0; c < inst.stations.size(); ++c) {
        const auto w = station_window(s, tl, inst, p, static_cast<int>(c));
        if (w) ranked.push_back({station_score(s, inst, p, static_cast<int>(c), *w), static_cast<int>(c), *w});
    }
    if (ranked.empty()) return false;
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) { return a.score > b.score; });
    const int top = std::min<int>(5, static_cast<int>(ranked.size()));
    const Ranked& pick = ranked[uniform_int(rng, 0, top - 1)];
    const Station& st = inst.stations[pick.station];
    const Kwh in = tl.leave_battery(p, inst) - energy(travel(leave_location(s, inst, p), st.location, inst).distance, inst.query.ev);
    const int n = std::min(static_cast<int>(std::floor((inst.query.ev.capacity - in) / slot_energy(st, inst.horizon) + 1e-9)),
                           pick.w.last - pick.w.first);
    if (n < 1) return false;
    const Action a = Action::charge(pick.station, pick.w.first, pick.w.first + n);
    if (!check_insert(s, tl, inst, p, a).feasible) return false;
    s.actions.push_back(a);
    return true;
}

Schedule build_once(const Instance& inst, const BaselineParams& params, Rng& rng) {
    Schedule s;
    std::vector<char> served(inst.orders.size(), 0);
    const Kwh low = params.charge_threshold * inst.query.ev.capacity;
    bool charged_here = false;
    for (;;) {
        const auto tl = Timeline::build(s, inst);
        if (!tl) break;
        const std::size_t p = s.size();
        if (!charged_here && tl->leave_battery(p, inst) <= low) {
            if (try_full_charge(s, *tl, inst, rng)) {
                charged_here = true;
                continue;
            }
        }
        charged_here = false;

        const Minutes now = tl->leave_time(p);
        std::vector<int> feasible;
        for (std::size_t o = 0; o < inst.orders.size(); ++o)
            if (!served[o] && check_insert(s, *tl, inst, p, Action::serve(static_cast<int>(o))).feasible)
                feasible.push_back(static_cast<int>(o));
        if (feasible.empty()) break;

        // Nearest window: smallest start not before now, ties by id; otherwise the latest start.
        int anchor = -1;
        for (int o : feasible) {
            const Minutes ws = inst.orders[o].window_start;
            if (ws < now) continue;
            if (anchor < 0 || ws < inst.orders[anchor].window_start) anchor = o;
        }
        if (anchor < 0) {
            for (int o : feasible)
                if (anchor < 0 || inst.orders[o].window_start > inst.orders[anchor].window_start) anchor = o;
        }
        const int hour = static_cast<int>(inst.orders[anchor].window_start / 60.0);
        std::vector<int> bucket;
        for (int o : feasible)
            if (static_cast<int>(inst.orders[o].window_start / 60.0) == hour) bucket.push_back(o);
        const int chosen = bucket[uniform_int(rng, 0, static_cast<int>(bucket.size()) - 1)];
        served[chosen] = 1;
        s.actions.push_back(Action::serve(chosen));
    }

    // Sell what is left at home, down to B^d.
    if (const auto tl = Timeline::build(s, inst)) {
        const std::size_t p = s.size();
        const int home = inst.home_destination();
        const Station& st = inst.stations[home];
        if (const auto w = station_window(s, *tl, inst, p, home)) {
            const Kwh in = tl->leave_battery(p, inst) -
                           energy(travel(leave_location(s, inst, p), st.location, inst).distance, inst.query.ev);
            const int n = std::min(
                static_cast<int>(std::floor((in - inst.query.ev.final_soc_min) / slot_energy(st, inst.horizon) + 1e-9)),
                w->last - w->first);
            if (n >= 1) {
                const Action a = Action::discharge(home, w->first, w->first + n);
                if (check_insert(s, *tl, inst, p, a).feasible) s.actions.push_back(a);
            }
        }
    }
    return s;
}

}  // namespace

SolverReport solve_baseline(const Instance& inst, const BaselineParams& params) {
    Stopwatch clock;
    if (!simulate(Schedule{}, inst).feasible()) throw NoFeasibleSolution("baseline: even the empty schedule is infeasible");
    Rng rng(params.seed);
    Schedule best;
    std::uint64_t attempts = 0;
    for (int r = 0; r <= params.max_restarts; ++r) {
        ++attempts;
        Schedule s = build_once(inst, params, rng);
        if (simulate(s, inst).feasible()) {
            best = std::move(s);
            break;
        }
    }
    SolverReport rep;
    rep.algo = "bl";
    rep.seed = params.seed;
    rep.instance = inst.name;
    rep.iterations = attempts;
    set_schedule(rep, inst, best);
    rep.wall_clock_s = clock.seconds();
    rep.convergence.push_back({rep.wall_clock_s, rep.total_profit});
    return rep;
}

}  // namespace evop
