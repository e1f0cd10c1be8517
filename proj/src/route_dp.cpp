#include "evop/route_dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "evop/metric.hpp"
#include "evop/simulate.hpp"

namespace evop {

namespace {
constexpr double kTimeTol = 1e-6;
constexpr double kMoneyEps = 1e-12;
}  // namespace

RouteSkeleton RouteSkeleton::from_schedule(const Schedule& s, int revisits) {
    RouteSkeleton out;
    out.revisits = revisits;
    for (const Action& a : s.actions) out.visits.push_back(a.is_serve() ? Visit::order(a.target) : Visit::station(a.target));
    return out;
}

void RouteSkeleton::validate(const Instance& inst) const {
    if (revisits < 0) throw std::invalid_argument("skeleton: revisits must be >= 0");
    std::set<int> seen;
    std::vector<int> uses(inst.stations.size(), 0);
    for (const Visit& v : visits) {
        if (v.kind == Visit::Kind::order) {
            if (v.id < 0 || v.id >= static_cast<int>(inst.orders.size()))
                throw std::invalid_argument("skeleton: unknown order " + std::to_string(v.id));
            if (!seen.insert(v.id).second) throw std::invalid_argument("skeleton: order " + std::to_string(v.id) + " repeated");
        } else {
            if (v.id < 0 || v.id >= static_cast<int>(inst.stations.size()))
                throw std::invalid_argument("skeleton: unknown station " + std::to_string(v.id));
            if (++uses[v.id] > revisits + 1)
                throw std::invalid_argument("skeleton: station " + std::to_string(v.id) + " exceeds the revisit cap");
        }
    }
}

void DpConfig::validate() const {
    if (!(battery_resolution > 0.0)) throw std::invalid_argument("dp: battery_resolution must be > 0");
    if (!(suboptimality_gap >= 0.0 && suboptimality_gap < 1.0)) throw std::invalid_argument("dp: gap must be in [0, 1)");
}

Money resolution_bound(const Instance& inst, double resolution, int station_visits) {
    const double price = std::max(inst.max_charge_price(), inst.max_discharge_price());
    return resolution * price * (station_visits + 1);
}

ScheduleDp::ScheduleDp(const Instance& inst, const DpConfig& cfg) : inst_(inst), cfg_(cfg) {
    cfg_.validate();
    buckets_ = static_cast<int>(std::floor(inst.query.ev.capacity / cfg_.battery_resolution)) + 1;
}

int ScheduleDp::bucket(Kwh battery) const {
    const int b = static_cast<int>(std::floor(std::max(0.0, battery) / cfg_.battery_resolution));
    return std::min(b, buckets_ - 1);
}

const Location& ScheduleDp::where(int loc) const {
    const int n = static_cast<int>(inst_.orders.size());
    if (loc < 0) return inst_.query.source;
    if (loc < n) return inst_.orders[loc].dropoff;
    return inst_.stations[loc - n].location;
}

int ScheduleDp::push(const Label& l) {
    ++created_;
    if (labels_.size() >= cfg_.max_states) throw CapExceeded("dp: more than " + std::to_string(cfg_.max_states) + " states");
    labels_.push_back(l);
    return static_cast<int>(labels_.size()) - 1;
}

void ScheduleDp::offer(Builder& b, const Label& l, int existing) {
    if (existing < 0 && filter_ && !filter_(l)) return;
    const long long key = static_cast<long long>(l.loc + 1) * buckets_ + bucket(l.battery);
    auto& group = b.groups[key];
    for (int id : group) {
        const Label& e = labels_[id];
        if (e.time <= l.time + kTimeTol && e.money >= l.money - kMoneyEps &&
            (e.time < l.time - kTimeTol || e.money > l.money + kMoneyEps || e.battery >= l.battery))
            return;
    }
    std::erase_if(group, [&](int id) {
        const Label& e = labels_[id];
        return e.time >= l.time - kTimeTol && e.money <= l.money + kMoneyEps;
    });
    group.push_back(existing >= 0 ? existing : push(l));
}

ScheduleDp::Frontier ScheduleDp::collect(const Builder& b) {
    Frontier out;
    for (const auto& [key, group] : b.groups) out.insert(out.end(), group.begin(), group.end());
    std::sort(out.begin(), out.end());
    return out;
}

ScheduleDp::Frontier ScheduleDp::start() {
    Label l;
    l.time = 0.0;
    l.battery = inst_.query.ev.initial_soc;
    l.loc = -1;
    return {push(l)};
}

ScheduleDp::Frontier ScheduleDp::serve(const Frontier& in, int order_id) {
    const Order& o = inst_.orders[order_id];
    const auto& ev = inst_.query.ev;
    const Minutes latest = std::min(o.window_end, inst_.query.work_end);
    Builder b;
    for (int id : in) {
        const Label src = labels_[id];
        const Leg leg = travel(where(src.loc), o.pickup, inst_);
        const Minutes begin = std::max({src.time + leg.time, o.window_start, inst_.query.work_start});
        if (begin > o.window_end + kTimeTol || begin + o.service_time > latest + kTimeTol) continue;
        const Kwh left = src.battery - energy(leg.distance, ev) - energy(o.service_distance, ev);
        if (left < -kBatteryTol) continue;
        Label l;
        l.time = begin + o.service_time;
        l.battery = left;
        l.money = src.money + o.fare;
        l.loc = order_id;
        l.parent = id;
        l.action = Action::serve(order_id);
        l.has_action = true;
        offer(b, l);
    }
    return collect(b);
}

ScheduleDp::Frontier ScheduleDp::visit_station(const Frontier& in, int station_id, bool allow_skip) {
    const Station& st = inst_.stations[station_id];
    const auto& ev = inst_.query.ev;
    const int slots = inst_.horizon.slot_count();
    const double delta = inst_.horizon.slot_minutes;
    const Kwh e = slot_energy(st, inst_.horizon);
    const int loc = static_cast<int>(inst_.orders.size()) + station_id;

    auto usable = [&](int k) {
        if (st.is_home()) return true;
        return inst_.horizon.slot_start(k) >= inst_.query.work_start - kTimeTol &&
               inst_.horizon.slot_start(k + 1) <= inst_.query.work_end + kTimeTol;
    };

    Builder b;
    if (allow_skip)
        for (int id : in) offer(b, labels_[id], id);

    struct Entry {
        int slot;
        int parent;
        Kwh battery;
        Money money;
    };
    std::vector<Entry> entries;
    for (int id : in) {
        const Label& src = labels_[id];
        const Leg leg = travel(where(src.loc), st.location, inst_);
        const Kwh left = src.battery - energy(leg.distance, ev);
        if (left < -kBatteryTol) continue;
        int k = static_cast<int>(std::ceil((src.time + leg.time - kTimeTol) / delta));
        k = std::max(k, 0);
        while (k < slots && !usable(k)) ++k;
        if (k >= slots) continue;
        entries.push_back({k, id, left, src.money});
    }
    if (entries.empty()) return collect(b);
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) { return x.slot < y.slot; });

    struct Cell {
        Money money = 0.0;
        Kwh battery = 0.0;
        int parent = -1;
        int begin = -1;
    };
    // Three modes: waiting to start, charging, discharging.
    std::vector<Cell> cur[3], nxt[3];
    std::vector<int> live[3], nlive[3];
    for (int m = 0; m < 3; ++m) {
        cur[m].assign(buckets_, {});
        nxt[m].assign(buckets_, {});
    }
    auto put = [&](std::vector<Cell>& cells, std::vector<int>& touched, const Cell& c) {
        const int q = bucket(c.battery);
        Cell& slot = cells[q];
        if (slot.parent < 0) {
            touched.push_back(q);
            slot = c;
        } else if (c.money > slot.money + kMoneyEps || (c.money >= slot.money - kMoneyEps && c.battery > slot.battery)) {
            slot = c;
        }
    };

    std::size_t next_entry = 0;
    for (int k = entries.front().slot; k <= slots; ++k) {
        while (next_entry < entries.size() && entries[next_entry].slot == k) {
            const Entry& en = entries[next_entry++];
            put(cur[0], live[0], {en.money, en.battery, en.parent, -1});
        }
        for (int m = 1; m < 3; ++m) {
            for (int q : live[m]) {
                const Cell& c = cur[m][q];
                Label l;
                l.time = inst_.horizon.slot_start(k);
                l.battery = c.battery;
                l.money = c.money;
                l.loc = loc;
                l.parent = c.parent;
                l.action = m == 1 ? Action::charge(station_id, c.begin, k) : Action::discharge(station_id, c.begin, k);
                l.has_action = true;
                offer(b, l);
            }
        }
        if (k == slots) break;
        if (live[0].empty() && live[1].empty() && live[2].empty() && next_entry >= entries.size()) break;

        const bool open = usable(k);
        const Money cp = st.tariff.charge_price[k] * e;
        const Money dp = st.tariff.discharge_price[k] * e;
        for (int q : live[0]) {
            const Cell c = cur[0][q];
            put(nxt[0], nlive[0], c);
            if (!open) continue;
            if (c.battery + e <= ev.capacity + kBatteryTol) put(nxt[1], nlive[1], {c.money - cp, c.battery + e, c.parent, k});
            if (c.battery - e >= -kBatteryTol) put(nxt[2], nlive[2], {c.money + dp, c.battery - e, c.parent, k});
        }
        if (open) {
            for (int q : live[1]) {
                const Cell c = cur[1][q];
                if (c.battery + e <= ev.capacity + kBatteryTol) put(nxt[1], nlive[1], {c.money - cp, c.battery + e, c.parent, c.begin});
            }
            for (int q : live[2]) {
                const Cell c = cur[2][q];
                if (c.battery - e >= -kBatteryTol) put(nxt[2], nlive[2], {c.money + dp, c.battery - e, c.parent, c.begin});
            }
        }
        for (int m = 0; m < 3; ++m) {
            for (int q : live[m]) cur[m][q] = Cell{};
            live[m].clear();
            std::swap(cur[m], nxt[m]);
            std::swap(live[m], nlive[m]);
        }
    }
    return collect(b);
}

std::optional<ScheduleDp::Finish> ScheduleDp::finish(const Frontier& in) const {
    const auto& ev = inst_.query.ev;
    std::optional<Finish> best;
    for (int id : in) {
        const Label& l = labels_[id];
        const Leg leg = travel(where(l.loc), inst_.query.destination, inst_);
        if (l.time + leg.time > kMinutesPerDay + kTimeTol) continue;
        const Kwh left = l.battery - energy(leg.distance, ev);
        if (left < -kBatteryTol || left < ev.final_soc_min - kBatteryTol) continue;
        if (!best || l.money > best->money + kMoneyEps) best = Finish{id, l.money};
    }
    return best;
}

Schedule ScheduleDp::reconstruct(int label) const {
    Schedule s;
    for (int id = label; id >= 0; id = labels_[id].parent)
        if (labels_[id].has_action) s.actions.push_back(labels_[id].action);
    std::reverse(s.actions.begin(), s.actions.end());
    return s;
}

RouteResult optimize_route_schedule(const Instance& inst, const RouteSkeleton& skel, const DpConfig& cfg,
                                    const Schedule* warm_start) {
    cfg.validate();
    skel.validate(inst);
    const auto& visits = skel.visits;
    const std::size_t n = visits.size();
    int station_visits = 0;
    for (const Visit& v : visits) station_visits += v.kind == Visit::Kind::station;

    std::optional<Money> lower;
    if (warm_start) {
        const SimResult r = simulate(*warm_start, inst);
        if (r.feasible()) lower = r.trace.total_money();
    }

    // Optimistic value still collectable after visit j: fares, selling the
    // whole battery at the best remaining price, and buy-low/sell-high spreads.
    std::vector<Money> fares(n + 1, 0.0), best_sell(n + 1, 0.0), spread(n + 1, 0.0);
    for (std::size_t j = n; j-- > 0;) {
        fares[j] = fares[j + 1];
        best_sell[j] = best_sell[j + 1];
        if (visits[j].kind == Visit::Kind::order) {
            fares[j] += inst.orders[visits[j].id].fare;
        } else {
            const auto& t = inst.stations[visits[j].id].tariff;
            best_sell[j] = std::max(best_sell[j], *std::max_element(t.discharge_price.begin(), t.discharge_price.end()));
        }
    }
    for (std::size_t j = n; j-- > 0;) {
        spread[j] = spread[j + 1];
        if (visits[j].kind != Visit::Kind::station) continue;
        const Station& st = inst.stations[visits[j].id];
        const double cheapest = *std::min_element(st.tariff.charge_price.begin(), st.tariff.charge_price.end());
        const double gain = best_sell[j] - cheapest;
        if (gain > 0.0) spread[j] += gain * slot_energy(st, inst.horizon) * inst.horizon.slot_count();
    }

    ScheduleDp dp(inst, cfg);
    ScheduleDp::Frontier f = dp.start();
    for (std::size_t j = 0; j < n; ++j) {
        if (lower) {
            const Money target = *lower;
            const double keep = *lower > 0.0 ? 1.0 - cfg.suboptimality_gap : 1.0;
            const Money rest_fares = fares[j + 1], sell = best_sell[j + 1], arb = spread[j + 1];
            // The warm start is kept as a fallback, so states that cannot beat
            // it by more than the gap are not worth expanding.
            dp.set_filter([=](const ScheduleDp::Label& l) {
                const Money bound = l.money + rest_fares + std::max(0.0, l.battery) * sell + arb;
                return bound * keep >= target - 1e-9;
            });
        }
        f = visits[j].kind == Visit::Kind::order ? dp.serve(f, visits[j].id) : dp.visit_station(f, visits[j].id, true);
        if (f.empty()) break;
    }

    RouteResult out;
    out.resolution_bound = resolution_bound(inst, cfg.battery_resolution, station_visits);
    const auto fin = f.empty() ? std::nullopt : dp.finish(f);
    if (fin) {
        out.schedule = dp.reconstruct(fin->label);
        const SimResult r = simulate(out.schedule, inst);
        if (!r.feasible()) throw std::logic_error("dp produced an infeasible schedule: " + r.error->describe());
        out.profit = r.trace.total_money();
    }
    if (lower && (!fin || *lower > out.profit)) {
        out.schedule = *warm_start;
        out.profit = *lower;
        return out;
    }
    if (!fin) throw RouteInfeasible("no feasible schedule follows the skeleton");
    return out;
}

}  // namespace evop
