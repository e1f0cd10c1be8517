#include "evop/construct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "evop/metric.hpp"

namespace evop {

namespace {
constexpr double kTimeTol = 1e-6;
}

const Location& leave_location(const Schedule& s, const Instance& inst, std::size_t p) {
    return p == 0 ? inst.query.source : exit_location(inst, s.actions[p - 1]);
}

const Location& entry_location_at(const Schedule& s, const Instance& inst, std::size_t p) {
    return p < s.size() ? entry_location(inst, s.actions[p]) : inst.query.destination;
}

std::optional<Timeline> Timeline::build(const Schedule& s, const Instance& inst) {
    SimResult sim = simulate(s, inst);
    if (!sim.feasible()) return std::nullopt;
    const std::size_t n = s.size();
    const auto& ev = inst.query.ev;
    Timeline tl;
    tl.trace = std::move(sim.trace);
    tl.latest.assign(n + 1, static_cast<double>(kMinutesPerDay));
    tl.spare.assign(n + 1, 0.0);
    tl.headroom.assign(n + 1, 0.0);
    tl.spare[n] = tl.trace.terminal_battery - ev.final_soc_min;
    tl.headroom[n] = ev.capacity - tl.trace.terminal_battery;
    for (std::size_t p = n; p-- > 0;) {
        const Action& a = s.actions[p];
        const auto& st = tl.trace.steps[p];
        if (a.is_serve()) {
            const Order& o = inst.orders[a.target];
            const Leg next = travel(o.dropoff, entry_location_at(s, inst, p + 1), inst);
            tl.latest[p] = std::min(std::min(o.window_end, inst.query.work_end) - o.service_time,
                                    tl.latest[p + 1] - next.time - o.service_time);
        } else {
            tl.latest[p] = inst.horizon.slot_start(a.slot_begin);
        }
        tl.spare[p] = std::min({tl.spare[p + 1], st.battery_in, st.battery_out});
        tl.headroom[p] = std::min({tl.headroom[p + 1], ev.capacity - st.battery_in, ev.capacity - st.battery_out});
    }
    return tl;
}

bool slot_usable(const Instance& inst, const Station& st, int k) {
    if (k < 0 || k >= inst.horizon.slot_count()) return false;
    if (st.is_home()) return true;
    return inst.horizon.slot_start(k) >= inst.query.work_start - kTimeTol &&
           inst.horizon.slot_start(k + 1) <= inst.query.work_end + kTimeTol;
}

InsertCheck check_insert(const Schedule& s, const Timeline& tl, const Instance& inst, std::size_t p, const Action& a) {
    InsertCheck out;
    const auto& ev = inst.query.ev;
    const Minutes t0 = tl.leave_time(p);
    const Kwh b0 = tl.leave_battery(p, inst);
    const Location& from = leave_location(s, inst, p);

    if (a.is_serve()) {
        const Order& o = inst.orders[a.target];
        const Leg leg = travel(from, o.pickup, inst);
        const Minutes start = std::max({t0 + leg.time, o.window_start, inst.query.work_start});
        out.depart = start + o.service_time;
        if (start > o.window_end + kTimeTol || out.depart > std::min(o.window_end, inst.query.work_end) + kTimeTol)
            return out;
        out.battery_after = b0 - energy(leg.distance, ev) - energy(o.service_distance, ev);
        if (out.battery_after < -kBatteryTol) return out;
        out.money = o.fare;
    } else {
        const Station& st = inst.stations[a.target];
        const Leg leg = travel(from, st.location, inst);
        const Kwh in = b0 - energy(leg.distance, ev);
        if (in < -kBatteryTol) return out;
        if (t0 + leg.time > inst.horizon.slot_start(a.slot_begin) + kTimeTol) return out;
        if (!slot_usable(inst, st, a.slot_begin) || !slot_usable(inst, st, a.slot_end - 1)) return out;
        const Kwh e = slot_energy(st, inst.horizon);
        const auto& prices = a.kind == ActionKind::charge ? st.tariff.charge_price : st.tariff.discharge_price;
        double sum = 0.0;
        for (int k = a.slot_begin; k < a.slot_end; ++k) sum += prices[k];
        if (a.kind == ActionKind::charge) {
            out.battery_after = in + e * a.slots();
            if (out.battery_after > ev.capacity + kBatteryTol) return out;
            out.money = -sum * e;
        } else {
            out.battery_after = in - e * a.slots();
            if (out.battery_after < -kBatteryTol) return out;
            out.money = sum * e;
        }
        out.depart = inst.horizon.slot_start(a.slot_end);
    }

    const Leg next = travel(exit_location(inst, a), entry_location_at(s, inst, p), inst);
    if (out.depart + next.time > tl.latest[p] + kTimeTol) return out;
    const Kwh delta = out.battery_after - energy(next.distance, ev) - tl.entry_battery(p);
    if (delta < 0.0 && -delta > tl.spare[p] + kBatteryTol) return out;
    if (delta > 0.0 && delta > tl.headroom[p] + kBatteryTol) return out;
    out.feasible = true;
    return out;
}

std::optional<SlotWindow> station_window(const Schedule& s, const Timeline& tl, const Instance& inst, std::size_t p,
                                         int station) {
    const Station& st = inst.stations[station];
    const Location& from = leave_location(s, inst, p);
    const Leg leg = travel(from, st.location, inst);
    if (tl.leave_battery(p, inst) - energy(leg.distance, inst.query.ev) < -kBatteryTol) return std::nullopt;
    const double delta = inst.horizon.slot_minutes;
    int first = static_cast<int>(std::ceil((tl.leave_time(p) + leg.time - kTimeTol) / delta));
    const Leg next = travel(st.location, entry_location_at(s, inst, p), inst);
    int last = static_cast<int>(std::floor((tl.latest[p] - next.time + kTimeTol) / delta));
    first = std::max(first, 0);
    last = std::min(last, inst.horizon.slot_count());
    while (first < last && !slot_usable(inst, st, first)) ++first;
    while (last > first && !slot_usable(inst, st, last - 1)) --last;
    if (first >= last) return std::nullopt;
    return SlotWindow{first, last};
}

Money station_score(const Schedule& s, const Instance& inst, std::size_t p, int station, const SlotWindow& w) {
    const Station& st = inst.stations[station];
    double sum = 0.0;
    for (int k = w.first; k < w.last; ++k) sum += st.tariff.discharge_price[k] - st.tariff.charge_price[k];
    const Kwh e = slot_energy(st, inst.horizon);
    return e * sum / (w.last - w.first) - energy_penalty(leave_location(s, inst, p), st.location, inst) -
           energy_penalty(st.location, entry_location_at(s, inst, p), inst);
}

std::optional<std::pair<int, int>> slot_count_range(const Schedule& s, const Timeline& tl, const Instance& inst,
                                                    std::size_t p, int station, const SlotWindow& w, bool charging) {
    const Station& st = inst.stations[station];
    const auto& ev = inst.query.ev;
    const Location& from = leave_location(s, inst, p);
    const Kwh in = tl.leave_battery(p, inst) - energy(travel(from, st.location, inst).distance, ev);
    const Kwh out_leg = energy(travel(st.location, entry_location_at(s, inst, p), inst).distance, ev);
    const Kwh base = in - out_leg - tl.entry_battery(p);
    const Kwh e = slot_energy(st, inst.horizon);
    double lo = 1.0, hi = 0.0;
    if (charging) {
        hi = std::min((tl.headroom[p] - base) / e, (ev.capacity - in) / e);
        lo = std::max(1.0, std::ceil((-tl.spare[p] - base) / e - 1e-9));
    } else {
        hi = std::min((tl.spare[p] + base) / e, in / e);
    }
    const int n_lo = static_cast<int>(lo);
    const int n_hi = std::min(static_cast<int>(std::floor(hi + 1e-9)), w.last - w.first);
    if (n_hi < n_lo) return std::nullopt;
    return std::pair{n_lo, n_hi};
}

std::optional<Schedule> random_cd_insert(const Schedule& s, const Timeline& tl, const Instance& inst, std::size_t p,
                                         Rng& rng) {
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
    if (ranked.empty()) return std::nullopt;
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) { return a.score > b.score; });
    const int top = std::min<int>(5, static_cast<int>(ranked.size()));
    const Ranked& pick = ranked[uniform_int(rng, 0, top - 1)];
    const bool charging = coin(rng, 0.5);
    const auto range = slot_count_range(s, tl, inst, p, pick.station, pick.w, charging);
    if (!range) return std::nullopt;
    const int n = uniform_int(rng, range->first, range->second);
    const int begin = uniform_int(rng, pick.w.first, pick.w.last - n);
    const Action a = charging ? Action::charge(pick.station, begin, begin + n) : Action::discharge(pick.station, begin, begin + n);
    if (!check_insert(s, tl, inst, p, a).feasible) return std::nullopt;
    Schedule out = s;
    out.actions.insert(out.actions.begin() + static_cast<std::ptrdiff_t>(p), a);
    if (!simulate(out, inst).feasible()) return std::nullopt;
    return out;
}

std::vector<char> served_mask(const Schedule& s, const Instance& inst) {
    std::vector<char> mask(inst.orders.size(), 0);
    for (const Action& a : s.actions)
        if (a.is_serve() && a.target >= 0 && a.target < static_cast<int>(mask.size())) mask[a.target] = 1;
    return mask;
}

Kwh reserve_from(const Location& from, const Instance& inst) {
    return energy(travel(from, inst.query.destination, inst).distance, inst.query.ev) + inst.query.ev.final_soc_min;
}

}  // namespace evop
