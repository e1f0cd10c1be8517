#include "evop/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "evop/metric.hpp"
#include "evop/simulate.hpp"

namespace evop {

namespace {

constexpr double kTimeTol = 1e-6;

int grid_station_count(const Instance& inst) {
    int n = 0;
    for (const Station& s : inst.stations) n += !s.is_home();
    return n;
}

struct Point {
    Minutes time;
    Kwh battery;
    Money money;
    std::vector<int> uses;
};

/// Stations with identical location, power, tariff and kind are interchangeable.
std::vector<int> twin_of(const Instance& inst) {
    std::vector<int> twin(inst.stations.size(), -1);
    for (std::size_t b = 0; b < inst.stations.size(); ++b) {
        for (std::size_t a = 0; a < b; ++a) {
            const Station& x = inst.stations[a];
            const Station& y = inst.stations[b];
            if (x.location == y.location && x.power_kw == y.power_kw && x.tariff == y.tariff &&
                x.is_home() == y.is_home()) {
                twin[b] = static_cast<int>(a);
                break;
            }
        }
    }
    return twin;
}

class Search {
public:
    Search(const Instance& inst, const ExactCaps& caps)
        : inst_(inst),
          caps_(caps),
          dp_(inst, DpConfig{caps.battery_resolution, 0.0, caps.max_states}),
          served_(inst.orders.size(), 0),
          uses_(inst.stations.size(), 0) {
        order_rank_.resize(inst.orders.size());
        std::iota(order_rank_.begin(), order_rank_.end(), 0);
        std::stable_sort(order_rank_.begin(), order_rank_.end(),
                         [&](int a, int b) { return inst.orders[a].fare > inst.orders[b].fare; });
        sell_ = inst.max_discharge_price();
        double cheapest = inst.max_charge_price();
        for (const Station& s : inst.stations)
            cheapest = std::min(cheapest, *std::min_element(s.tariff.charge_price.begin(), s.tariff.charge_price.end()));
        spread_ = std::max(0.0, sell_ - cheapest);
        twin_ = twin_of(inst);
        build_sell_table();
    }

    void run() {
        const ScheduleDp::Frontier root = dp_.start();
        expand(root, -1);
    }

    bool found() const { return found_; }
    const Schedule& best() const { return best_schedule_; }
    std::uint64_t nodes() const { return nodes_; }

private:
    const Location& exit_of(int last) const {
        const int n = static_cast<int>(inst_.orders.size());
        if (last < 0) return inst_.query.source;
        if (last < n) return inst_.orders[last].dropoff;
        return inst_.stations[last - n].location;
    }

    /// For every first slot, the remaining slots by best selling price with the most energy any station moves then.
    void build_sell_table() {
        const int slots = inst_.horizon.slot_count();
        std::vector<std::pair<double, double>> best(slots, {0.0, 0.0});
        for (const Station& st : inst_.stations) {
            const Kwh e = slot_energy(st, inst_.horizon);
            for (int k = 0; k < slots; ++k) {
                const bool open = st.is_home() || (inst_.horizon.slot_start(k) >= inst_.query.work_start - kTimeTol &&
                                                   inst_.horizon.slot_start(k + 1) <= inst_.query.work_end + kTimeTol);
                if (!open) continue;
                best[k].first = std::max(best[k].first, st.tariff.discharge_price[k]);
                best[k].second = std::max(best[k].second, e);
            }
        }
        sell_table_.assign(slots + 1, {});
        for (int k0 = 0; k0 < slots; ++k0) {
            auto& row = sell_table_[k0];
            row.assign(best.begin() + k0, best.end());
            std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        }
    }

    /// Most money that selling `energy` from time `t` on could earn, ignoring travel.
    Money sell_value(Minutes t, Kwh energy) const {
        if (energy <= 0.0) return 0.0;
        const int k0 = std::clamp(static_cast<int>(std::ceil((t - kTimeTol) / inst_.horizon.slot_minutes)), 0,
                                  inst_.horizon.slot_count());
        Money v = 0.0;
        for (const auto& [price, cap] : sell_table_[k0]) {
            const Kwh take = std::min(cap, energy);
            v += take * price;
            energy -= take;
            if (energy <= 0.0) break;
        }
        return v;
    }

    Money upper_bound(const ScheduleDp::Frontier& f, int last) const {
        Money head = -1e300;
        Minutes earliest = 1e300;
        for (int id : f) {
            const auto& l = dp_.label(id);
            head = std::max(head, l.money + sell_value(l.time, l.battery - inst_.query.ev.final_soc_min));
            earliest = std::min(earliest, l.time);
        }
        const Location& here = exit_of(last);
        Money fares = 0.0;
        for (std::size_t o = 0; o < inst_.orders.size(); ++o) {
            if (served_[o]) continue;
            const Order& ord = inst_.orders[o];
            const Minutes begin =
                std::max({earliest + travel(here, ord.pickup, inst_).time, ord.window_start, inst_.query.work_start});
            if (begin + ord.service_time <= std::min(ord.window_end, inst_.query.work_end) + kTimeTol) fares += ord.fare;
        }
        Money arb = 0.0;
        if (spread_ > 0.0) {
            int left = 0;
            for (std::size_t s = 0; s < uses_.size(); ++s) left += caps_.revisits + 1 - uses_[s];
            arb = spread_ * inst_.query.ev.capacity * left;
        }
        return head + fares + arb;
    }

    std::string key(int last) const {
        std::string k(served_.begin(), served_.end());
        k += std::to_string(last);
        return k;
    }

    static bool fewer_uses(const std::vector<int>& a, const std::vector<int>& b) {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] > b[i]) return false;
        return true;
    }

    /// True when every label is matched by an earlier, no-later, no-poorer one
    /// that served the same orders, ends at the same place and used no more station visits.
    bool dominated(const ScheduleDp::Frontier& f, int last) {
        auto& store = memo_[key(last)];
        bool all = true;
        for (int id : f) {
            const auto& l = dp_.label(id);
            const bool beaten = std::any_of(store.begin(), store.end(), [&](const Point& p) {
                return p.time <= l.time + kTimeTol && p.battery >= l.battery - 1e-9 && p.money >= l.money - 1e-9 &&
                       fewer_uses(p.uses, uses_);
            });
            if (beaten) continue;
            all = false;
            std::erase_if(store, [&](const Point& p) {
                return p.time >= l.time - kTimeTol && p.battery <= l.battery + 1e-9 && p.money <= l.money + 1e-9 &&
                       fewer_uses(uses_, p.uses);
            });
            store.push_back({l.time, l.battery, l.money, uses_});
        }
        return all;
    }

    void expand(const ScheduleDp::Frontier& f, int last) {
        ++nodes_;
        if (const auto fin = dp_.finish(f); fin && (!found_ || fin->money > best_money_ + 1e-12)) {
            found_ = true;
            best_money_ = fin->money;
            best_schedule_ = dp_.reconstruct(fin->label);
        }
        if (caps_.bound_pruning && found_ && upper_bound(f, last) <= best_money_ + 1e-9) return;
        if (caps_.dominance_pruning && dominated(f, last)) return;

        const std::size_t mark = dp_.size();
        const int n = static_cast<int>(inst_.orders.size());
        for (int o : order_rank_) {
            if (served_[o]) continue;
            const ScheduleDp::Frontier child = dp_.serve(f, o);
            if (!child.empty()) {
                served_[o] = 1;
                expand(child, o);
                served_[o] = 0;
            }
            dp_.truncate(mark);
        }
        for (std::size_t s = 0; s < inst_.stations.size(); ++s) {
            if (uses_[s] > caps_.revisits) continue;
            // A twin is only opened once the first copy is used up.
            if (twin_[s] >= 0 && uses_[twin_[s]] <= caps_.revisits) continue;
            const ScheduleDp::Frontier child = dp_.visit_station(f, static_cast<int>(s), false);
            if (!child.empty()) {
                ++uses_[s];
                expand(child, n + static_cast<int>(s));
                --uses_[s];
            }
            dp_.truncate(mark);
        }
    }

    const Instance& inst_;
    ExactCaps caps_;
    ScheduleDp dp_;
    std::vector<char> served_;
    std::vector<int> uses_;
    std::vector<int> order_rank_;
    double sell_ = 0.0;
    double spread_ = 0.0;
    std::vector<int> twin_;
    std::vector<std::vector<std::pair<double, double>>> sell_table_;
    std::unordered_map<std::string, std::vector<Point>> memo_;
    bool found_ = false;
    Money best_money_ = 0.0;
    Schedule best_schedule_;
    std::uint64_t nodes_ = 0;
};

}  // namespace

SolverReport solve_exact(const Instance& inst, const ExactCaps& caps) {
    Stopwatch clock;
    if (static_cast<int>(inst.orders.size()) > caps.max_orders)
        throw CapExceeded("exact: " + std::to_string(inst.orders.size()) + " orders exceed the cap of " +
                          std::to_string(caps.max_orders));
    if (grid_station_count(inst) > caps.max_station_nodes)
        throw CapExceeded("exact: " + std::to_string(grid_station_count(inst)) + " grid stations exceed the cap of " +
                          std::to_string(caps.max_station_nodes));
    if (caps.revisits < 0) throw std::invalid_argument("exact: revisits must be >= 0");

    Search search(inst, caps);
    search.run();

    SolverReport r;
    r.algo = "exact";
    r.instance = inst.name;
    r.iterations = search.nodes();
    if (search.found()) set_schedule(r, inst, search.best());
    int station_visits = 0;
    for (const Action& a : r.schedule.actions) station_visits += a.is_energy();
    r.dp_bound = resolution_bound(inst, caps.battery_resolution, station_visits);
    r.wall_clock_s = clock.seconds();
    r.convergence.push_back({r.wall_clock_s, r.total_profit});
    return r;
}

namespace {

class Enumerator {
public:
    Enumerator(const Instance& inst, const BruteForceCaps& caps)
        : inst_(inst), caps_(caps), served_(inst.orders.size(), 0), uses_(inst.stations.size(), 0) {}

    void run() {
        walk(0.0, inst_.query.ev.initial_soc, 0.0, inst_.query.source);
    }

    bool found() const { return found_; }
    const Schedule& best() const { return best_; }
    std::uint64_t nodes() const { return nodes_; }

private:
    bool usable(const Station& st, int k) const {
        if (st.is_home()) return true;
        return inst_.horizon.slot_start(k) >= inst_.query.work_start - kTimeTol &&
               inst_.horizon.slot_start(k + 1) <= inst_.query.work_end + kTimeTol;
    }

    void record(Money money) {
        if (found_ && money < best_money_ - 1e-9) return;
        // Keep the simulator's own sum so the oracle reports the same rounding as everyone else.
        const SimResult sim = simulate(path_, inst_);
        if (!sim.feasible()) return;
        const Money total = sim.trace.total_money();
        if (!found_ || total > best_money_ + 1e-12) {
            found_ = true;
            best_money_ = total;
            best_ = path_;
        }
    }

    void walk(Minutes now, Kwh battery, Money money, const Location& here) {
        if (++nodes_ > caps_.max_nodes) throw CapExceeded("brute force: node budget exhausted");
        const auto& ev = inst_.query.ev;

        const Leg home = travel(here, inst_.query.destination, inst_);
        const Kwh end_battery = battery - energy(home.distance, ev);
        if (now + home.time <= kMinutesPerDay + kTimeTol && end_battery >= ev.final_soc_min - kBatteryTol &&
            end_battery >= -kBatteryTol)
            record(money);

        for (std::size_t i = 0; i < inst_.orders.size(); ++i) {
            if (served_[i]) continue;
            const Order& o = inst_.orders[i];
            const Leg leg = travel(here, o.pickup, inst_);
            const Minutes pickup = std::max({now + leg.time, o.window_start, inst_.query.work_start});
            const Minutes done = pickup + o.service_time;
            if (pickup > o.window_end + kTimeTol || done > o.window_end + kTimeTol || done > inst_.query.work_end + kTimeTol)
                continue;
            const Kwh left = battery - energy(leg.distance, ev) - energy(o.service_distance, ev);
            if (left < -kBatteryTol) continue;
            served_[i] = 1;
            path_.actions.push_back(Action::serve(static_cast<int>(i)));
            walk(done, left, money + o.fare, o.dropoff);
            path_.actions.pop_back();
            served_[i] = 0;
        }

        const int slots = inst_.horizon.slot_count();
        for (std::size_t s = 0; s < inst_.stations.size(); ++s) {
            if (uses_[s] > caps_.revisits) continue;
            const Station& st = inst_.stations[s];
            const Leg leg = travel(here, st.location, inst_);
            const Kwh arrive = battery - energy(leg.distance, ev);
            if (arrive < -kBatteryTol) continue;
            const Minutes at = now + leg.time;
            const Kwh per_slot = st.power_kw * inst_.horizon.slot_minutes / 60.0;
            ++uses_[s];
            for (int kind = 0; kind < 2; ++kind) {
                const bool charging = kind == 0;
                for (int begin = 0; begin < slots; ++begin) {
                    if (inst_.horizon.slot_start(begin) < at - kTimeTol || !usable(st, begin)) continue;
                    Kwh b = arrive;
                    Money m = money;
                    for (int end = begin + 1; end <= std::min(slots, begin + caps_.max_slots); ++end) {
                        const int k = end - 1;
                        if (!usable(st, k)) break;
                        if (charging) {
                            b += per_slot;
                            m -= st.tariff.charge_price[k] * per_slot;
                            if (b > ev.capacity + kBatteryTol) break;
                        } else {
                            b -= per_slot;
                            m += st.tariff.discharge_price[k] * per_slot;
                            if (b < -kBatteryTol) break;
                        }
                        path_.actions.push_back(charging ? Action::charge(static_cast<int>(s), begin, end)
                                                         : Action::discharge(static_cast<int>(s), begin, end));
                        walk(inst_.horizon.slot_start(end), b, m, st.location);
                        path_.actions.pop_back();
                    }
                }
            }
            --uses_[s];
        }
    }

    const Instance& inst_;
    BruteForceCaps caps_;
    std::vector<char> served_;
    std::vector<int> uses_;
    Schedule path_;
    bool found_ = false;
    Money best_money_ = 0.0;
    Schedule best_;
    std::uint64_t nodes_ = 0;
};

}  // namespace

SolverReport brute_force_reference(const Instance& inst, const BruteForceCaps& caps) {
    Stopwatch clock;
    if (static_cast<int>(inst.orders.size()) > caps.max_orders)
        throw CapExceeded("brute force: " + std::to_string(inst.orders.size()) + " orders exceed the cap of " +
                          std::to_string(caps.max_orders));
    double smallest = 1e300;
    for (const Station& s : inst.stations) smallest = std::min(smallest, slot_energy(s, inst.horizon));
    if (!inst.stations.empty() && std::floor(inst.query.ev.capacity / smallest + 1e-9) > caps.max_slots)
        throw CapExceeded("brute force: a single action could span more than " + std::to_string(caps.max_slots) +
                          " slots");

    Enumerator e(inst, caps);
    e.run();

    SolverReport r;
    r.algo = "brute_force";
    r.instance = inst.name;
    r.iterations = e.nodes();
    if (e.found()) set_schedule(r, inst, e.best());
    r.wall_clock_s = clock.seconds();
    r.convergence.push_back({r.wall_clock_s, r.total_profit});
    return r;
}

}  // namespace evop
