#include "evop/lns.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "evop/metric.hpp"
#include "evop/route_dp.hpp"
#include "evop/simulate.hpp"

namespace evop {

void LnsParams::validate() const {
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("lns: theta must lie in (0, 1)");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("lns: alpha must lie in (0, 1]");
    if (!(rank_power >= 1.0)) throw std::invalid_argument("lns: rank_power must be >= 1");
    if (regret_k < 2) throw std::invalid_argument("lns: regret_k must be >= 2");
    if (!(removal_fraction_max > 0.0 && removal_fraction_max <= 1.0))
        throw std::invalid_argument("lns: removal_fraction_max must lie in (0, 1]");
    if (max_consecutive_cd < 1) throw std::invalid_argument("lns: max_consecutive_cd must be >= 1");
    if (reopt_every < 1) throw std::invalid_argument("lns: reopt_every must be >= 1");
    if (!(reopt_gap >= 0.0 && reopt_gap < 1.0)) throw std::invalid_argument("lns: reopt_gap must lie in [0, 1)");
    if (!(battery_resolution > 0.0)) throw std::invalid_argument("lns: battery_resolution must be positive");
    if (!(time_limit >= 0.0)) throw std::invalid_argument("lns: time_limit must be >= 0");
}

RepairArm repair_arm(int index) {
    return {index / 2 == 0 ? OrderInsert::max_profit : OrderInsert::regret_k,
            index % 2 == 0 ? CdInsert::closeness : CdInsert::price};
}

int rank_pick_at(int n, double m, double r) {
    if (n < 1) throw std::invalid_argument("rank_pick: empty candidate list");
    const int idx = static_cast<int>(std::floor(std::pow(r, m) * n));
    return std::clamp(idx, 0, n - 1);
}

int rank_random_pick(int n, double m, Rng& rng) { return rank_pick_at(n, m, uniform01(rng)); }

double alns_update(double w, Money s, Money s_best, double alpha) {
    return std::max(alpha * std::max(s - s_best, 0.0) + (1.0 - alpha) * w, DBL_MIN);
}

int roulette(const std::array<double, 4>& w, Rng& rng) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    double r = uniform01(rng) * total;
    for (int i = 0; i < 4; ++i) {
        if (r < w[i]) return i;
        r -= w[i];
    }
    return 3;
}

LnsContext::LnsContext(const Instance& inst) {
    double best = 0.0;
    for (std::size_t i = 0; i < inst.orders.size(); ++i)
        for (std::size_t j = i + 1; j < inst.orders.size(); ++j) {
            const Order& a = inst.orders[i];
            const Order& b = inst.orders[j];
            best = std::max({best, haversine_km(a.pickup, b.pickup), haversine_km(a.dropoff, b.dropoff)});
        }
    if (best > 0.0) max_order_distance = best;
}

std::vector<double> removal_scores(const Schedule& s, const Instance& inst) {
    std::vector<double> out;
    out.reserve(s.size());
    const double max_c = inst.max_charge_price();
    for (const Action& a : s.actions) {
        if (a.is_serve()) {
            out.push_back(inst.orders[a.target].fare);
            continue;
        }
        const Station& st = inst.stations[a.target];
        double sum = 0.0;
        for (int k = a.slot_begin; k < a.slot_end; ++k)
            sum += a.kind == ActionKind::charge ? max_c - st.tariff.charge_price[k] : st.tariff.charge_price[k];
        out.push_back(sum * slot_energy(st, inst.horizon));
    }
    return out;
}

namespace {

struct Footprint {
    const Location* pickup;
    const Location* dropoff;
    Minutes begin;
    Minutes end;
};

Footprint footprint(const Action& a, const Instance& inst) {
    if (a.is_serve()) {
        const Order& o = inst.orders[a.target];
        return {&o.pickup, &o.dropoff, o.window_start, o.window_end};
    }
    const Station& st = inst.stations[a.target];
    return {&st.location, &st.location, inst.horizon.slot_start(a.slot_begin), inst.horizon.slot_start(a.slot_end)};
}

Schedule without(const Schedule& s, const std::vector<char>& removed) {
    Schedule out;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!removed[i]) out.actions.push_back(s.actions[i]);
    return out;
}

}  // namespace

Schedule restore_feasibility(Schedule s, const Instance& inst) {
    for (;;) {
        const SimResult r = simulate(s, inst);
        if (r.feasible() || s.empty()) return s;
        const Infeasibility& why = *r.error;
        std::size_t drop = s.size() - 1;
        if (why.kind == Violation::window_violated || why.kind == Violation::duplicate_order) {
            for (std::size_t i = 0; i < s.size(); ++i)
                if (s.actions[i].is_serve() && s.actions[i].target == why.index) drop = i;
        } else if (why.index >= 0 && why.index < static_cast<int>(s.size())) {
            drop = static_cast<std::size_t>(why.index);
        }
        s.actions.erase(s.actions.begin() + static_cast<std::ptrdiff_t>(drop));
    }
}

double relatedness(const Action& a, const Action& b, const Instance& inst, const LnsContext& ctx) {
    const Footprint fa = footprint(a, inst), fb = footprint(b, inst);
    const double d = haversine_km(*fa.dropoff, *fb.dropoff) + haversine_km(*fa.pickup, *fb.pickup);
    const double t = std::abs(fa.begin - fb.begin) + std::abs(fa.end - fb.end);
    return d / ctx.max_order_distance + t / kMinutesPerDay;
}

Schedule destroy(const Schedule& s, DestroyKind kind, int k, const Instance& inst, const LnsContext& ctx,
                 const LnsParams& params, Rng& rng) {
    const int n = static_cast<int>(s.size());
    k = std::clamp(k, 0, n);
    if (k == 0) return s;
    if (k == n) return {};
    std::vector<char> removed(n, 0);

    switch (kind) {
    case DestroyKind::random: {
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        for (int i = 0; i < k; ++i) {
            const int j = uniform_int(rng, i, n - 1);
            std::swap(idx[i], idx[j]);
            removed[idx[i]] = 1;
        }
        break;
    }
    case DestroyKind::worst_profit: {
        const auto score = removal_scores(s, inst);
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return score[a] < score[b]; });
        for (int i = 0; i < k; ++i) {
            const int pick = rank_random_pick(static_cast<int>(order.size()), params.rank_power, rng);
            removed[order[pick]] = 1;
            order.erase(order.begin() + pick);
        }
        break;
    }
    case DestroyKind::closeness: {
        std::vector<int> cd;
        for (int i = 0; i < n; ++i)
            if (s.actions[i].is_energy()) cd.push_back(i);
        const int seed = cd.empty() ? uniform_int(rng, 0, n - 1) : cd[uniform_int(rng, 0, static_cast<int>(cd.size()) - 1)];
        const Location& here = entry_location(inst, s.actions[seed]);
        std::vector<std::pair<double, int>> near;
        for (int i = 0; i < n; ++i)
            if (i != seed) near.push_back({haversine_km(here, entry_location(inst, s.actions[i])), i});
        std::stable_sort(near.begin(), near.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        removed[seed] = 1;
        for (int i = 0; i < k - 1; ++i) removed[near[i].second] = 1;
        break;
    }
    case DestroyKind::shaw: {
        std::vector<int> out{uniform_int(rng, 0, n - 1)};
        removed[out[0]] = 1;
        while (static_cast<int>(out.size()) < k) {
            const Action& ref = s.actions[out[uniform_int(rng, 0, static_cast<int>(out.size()) - 1)]];
            std::vector<std::pair<double, int>> rel;
            for (int i = 0; i < n; ++i)
                if (!removed[i]) rel.push_back({relatedness(ref, s.actions[i], inst, ctx), i});
            std::stable_sort(rel.begin(), rel.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
            const int pick = rel[rank_random_pick(static_cast<int>(rel.size()), params.rank_power, rng)].second;
            removed[pick] = 1;
            out.push_back(pick);
        }
        break;
    }
    }
    return restore_feasibility(without(s, removed), inst);
}

Money regret_value(std::vector<Money> profits, int k) {
    if (profits.size() < 2) return 0.0;
    std::sort(profits.begin(), profits.end(), std::greater<>());
    Money r = 0.0;
    for (std::size_t i = 1; i < profits.size() && static_cast<int>(i) < k; ++i) r += profits[0] - profits[i];
    return r;
}

namespace {

struct OrderSlot {
    Money value;
    int order;
    std::size_t gap;
};

/// Every feasible (order, gap) pair with its insertion profit.
std::vector<OrderSlot> order_slots(const Schedule& s, const Timeline& tl, const Instance& inst) {
    std::vector<OrderSlot> out;
    const auto served = served_mask(s, inst);
    const Minutes ws = inst.query.work_start, we = inst.query.work_end;
    for (std::size_t o = 0; o < inst.orders.size(); ++o) {
        if (served[o]) continue;
        const Order& ord = inst.orders[o];
        const Minutes last_start = std::min(ord.window_end, we) - ord.service_time;
        const Minutes earliest_done = std::max(ord.window_start, ws) + ord.service_time;
        for (std::size_t p = 0; p < tl.gaps(); ++p) {
            // Cheap time screens before the full check.
            if (tl.leave_time(p) > last_start + 1e-6) break;
            if (earliest_done > tl.latest[p] + 1e-6) continue;
            const Action a = Action::serve(static_cast<int>(o));
            if (!check_insert(s, tl, inst, p, a).feasible) continue;
            const Money v = ord.fare - energy_penalty(leave_location(s, inst, p), ord.pickup, inst) -
                            energy_penalty(ord.dropoff, entry_location_at(s, inst, p), inst);
            out.push_back({v, static_cast<int>(o), p});
        }
    }
    return out;
}

std::optional<Schedule> place(const Schedule& s, std::size_t p, const Action& a, const Instance& inst) {
    Schedule out = s;
    out.actions.insert(out.actions.begin() + static_cast<std::ptrdiff_t>(p), a);
    if (!simulate(out, inst).feasible()) return std::nullopt;
    return out;
}

int consecutive_cd(const Schedule& s, std::size_t p) {
    int c = 0;
    for (std::size_t i = p; i-- > 0 && s.actions[i].is_energy();) ++c;
    for (std::size_t i = p; i < s.size() && s.actions[i].is_energy(); ++i) ++c;
    return c;
}

}  // namespace

std::optional<Schedule> insert_order(const Schedule& s, OrderInsert strategy, const Instance& inst, const LnsParams& params,
                                     Rng& rng) {
    const auto tl = Timeline::build(s, inst);
    if (!tl) return std::nullopt;
    auto slots = order_slots(s, *tl, inst);
    if (slots.empty()) return std::nullopt;

    if (strategy == OrderInsert::max_profit) {
        std::stable_sort(slots.begin(), slots.end(), [](const OrderSlot& a, const OrderSlot& b) { return a.value > b.value; });
        while (!slots.empty()) {
            const int i = rank_random_pick(static_cast<int>(slots.size()), params.rank_power, rng);
            if (auto out = place(s, slots[i].gap, Action::serve(slots[i].order), inst)) return out;
            slots.erase(slots.begin() + i);
        }
        return std::nullopt;
    }

    // Regret: group by order, keep each order's best position.
    struct Cand {
        Money regret;
        Money best;
        int order;
        std::size_t gap;
    };
    std::vector<Cand> cands;
    std::stable_sort(slots.begin(), slots.end(), [](const OrderSlot& a, const OrderSlot& b) { return a.order < b.order; });
    for (std::size_t i = 0; i < slots.size();) {
        std::size_t j = i;
        std::vector<Money> values;
        std::size_t best = i;
        for (; j < slots.size() && slots[j].order == slots[i].order; ++j) {
            values.push_back(slots[j].value);
            if (slots[j].value > slots[best].value) best = j;
        }
        cands.push_back({regret_value(values, params.regret_k), slots[best].value, slots[i].order, slots[best].gap});
        i = j;
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        return a.regret != b.regret ? a.regret > b.regret : a.best > b.best;
    });
    while (!cands.empty()) {
        const int i = rank_random_pick(static_cast<int>(cands.size()), params.rank_power, rng);
        if (auto out = place(s, cands[i].gap, Action::serve(cands[i].order), inst)) return out;
        cands.erase(cands.begin() + i);
    }
    return std::nullopt;
}

int cd_direction(const Timeline& tl, std::size_t p, const Instance& inst, double theta) {
    const double slack = tl.spare[p] - inst.query.ev.capacity * theta;
    if (slack < -1e-9) return 1;
    if (slack > 1e-9) return -1;
    return 0;
}

std::vector<CdOption> rank_cd_options(const Schedule& s, const Timeline& tl, const Instance& inst, std::size_t p,
                                      CdInsert strategy, int direction) {
    std::vector<CdOption> out;
    if (direction == 0) return out;
    const bool charging = direction > 0;
    const Location& prev = leave_location(s, inst, p);
    const Location& next = entry_location_at(s, inst, p);
    const Km direct = travel(prev, next, inst).distance;
    for (std::size_t c = 0; c < inst.stations.size(); ++c) {
        const int id = static_cast<int>(c);
        const auto w = station_window(s, tl, inst, p, id);
        if (!w || !slot_count_range(s, tl, inst, p, id, *w, charging)) continue;
        const Station& st = inst.stations[c];
        double key = 0.0;
        if (strategy == CdInsert::closeness) {
            key = travel(prev, st.location, inst).distance + travel(st.location, next, inst).distance - direct;
        } else {
            const auto& prices = charging ? st.tariff.charge_price : st.tariff.discharge_price;
            double sum = 0.0;
            for (int k = w->first; k < w->last; ++k) sum += prices[k];
            const double mean = sum / (w->last - w->first);
            key = charging ? mean : -mean;
        }
        out.push_back({id, key});
    }
    std::stable_sort(out.begin(), out.end(), [](const CdOption& a, const CdOption& b) { return a.key < b.key; });
    return out;
}

namespace {

/// forced = 0 follows the direction rule; +1 or -1 overrides it and takes
/// the longest, earliest run instead of a random best-priced one.
std::optional<Schedule> insert_cd_dir(const Schedule& s, CdInsert strategy, const Instance& inst, const LnsParams& params,
                                      Rng& rng, int forced) {
    const auto tl = Timeline::build(s, inst);
    if (!tl) return std::nullopt;
    std::vector<std::size_t> gaps(tl->gaps());
    std::iota(gaps.begin(), gaps.end(), std::size_t{0});
    std::shuffle(gaps.begin(), gaps.end(), rng);
    for (std::size_t p : gaps) {
        if (consecutive_cd(s, p) >= params.max_consecutive_cd) continue;
        const int dir = forced != 0 ? forced : cd_direction(*tl, p, inst, params.theta);
        auto options = rank_cd_options(s, *tl, inst, p, strategy, dir);
        if (options.empty()) continue;
        const int station = options[rank_random_pick(static_cast<int>(options.size()), params.rank_power, rng)].station;
        const bool charging = dir > 0;
        const auto w = station_window(s, *tl, inst, p, station);
        const auto range = slot_count_range(s, *tl, inst, p, station, *w, charging);
        const int n = forced != 0 ? range->second : uniform_int(rng, range->first, range->second);

        // Best-priced run of n slots inside the window, earliest on ties.
        const Station& st = inst.stations[station];
        const auto& prices = charging ? st.tariff.charge_price : st.tariff.discharge_price;
        double run = 0.0;
        for (int k = w->first; k < w->first + n; ++k) run += prices[k];
        double best = run;
        int begin = w->first;
        for (int b = w->first + 1; forced == 0 && b + n <= w->last; ++b) {
            run += prices[b + n - 1] - prices[b - 1];
            if (charging ? run < best - 1e-12 : run > best + 1e-12) {
                best = run;
                begin = b;
            }
        }
        const Action a = charging ? Action::charge(station, begin, begin + n) : Action::discharge(station, begin, begin + n);
        if (!check_insert(s, *tl, inst, p, a).feasible) continue;
        if (auto out = place(s, p, a, inst)) return out;
    }
    return std::nullopt;
}

}  // namespace

std::optional<Schedule> insert_cd(const Schedule& s, CdInsert strategy, const Instance& inst, const LnsParams& params,
                                  Rng& rng) {
    return insert_cd_dir(s, strategy, inst, params, rng, 0);
}

namespace {

/// The direction rule only looks at the actions already planned, so a schedule
/// with spare energy never charges for an order it cannot reach yet. This tries
/// a few charges and keeps the first one after which an order fits.
std::optional<Schedule> enabling_charge(const Schedule& s, RepairArm arm, const Instance& inst, const LnsParams& params,
                                        Rng& rng) {
    for (int t = 0; t < 3; ++t) {
        const auto charged = insert_cd_dir(s, arm.cd, inst, params, rng, 1);
        if (!charged) return std::nullopt;
        if (auto out = insert_order(*charged, arm.order, inst, params, rng)) return out;
    }
    return std::nullopt;
}

}  // namespace

Schedule repair(const Schedule& partial, RepairArm arm, const Instance& inst, const LnsParams& params, Rng& rng) {
    Schedule s = partial;
    const Kwh low = inst.query.ev.capacity * params.theta;
    // Every insertion consumes time; the cap only guards against pathological loops.
    const std::size_t cap = 4 * (inst.orders.size() + inst.stations.size()) + 64;
    for (std::size_t step = 0; step < cap; ++step) {
        const auto tl = Timeline::build(s, inst);
        if (!tl) break;
        const bool battery_first = tl->trace.terminal_battery < low;
        std::optional<Schedule> next;
        if (battery_first) {
            next = insert_cd(s, arm.cd, inst, params, rng);
            if (!next) next = insert_order(s, arm.order, inst, params, rng);
        } else {
            next = insert_order(s, arm.order, inst, params, rng);
            if (!next) next = enabling_charge(s, arm, inst, params, rng);
            if (!next) next = insert_cd(s, arm.cd, inst, params, rng);
        }
        if (!next) break;
        s = std::move(*next);
    }
    return s;
}

Schedule reoptimize(const Schedule& s, const Instance& inst, const LnsParams& params) {
    RouteSkeleton skel;
    skel.visits.push_back(Visit::station(inst.home_source()));
    for (const Action& a : s.actions)
        skel.visits.push_back(a.is_serve() ? Visit::order(a.target) : Visit::station(a.target));
    skel.visits.push_back(Visit::station(inst.home_destination()));
    skel.revisits = static_cast<int>(skel.visits.size());
    DpConfig cfg;
    cfg.battery_resolution = params.battery_resolution;
    cfg.suboptimality_gap = params.reopt_gap;
    try {
        return optimize_route_schedule(inst, skel, cfg, &s).schedule;
    } catch (const CapExceeded&) {
        return s;
    }
}

SolverReport run_lns(const Instance& inst, const LnsParams& params) {
    params.validate();
    Stopwatch clock;
    Rng rng(params.seed);
    const LnsContext ctx(inst);
    OperatorWeights weights;

    Schedule best;
    Money best_profit = profit(best, inst);
    SolverReport rep;
    rep.algo = "lns";
    rep.seed = params.seed;
    rep.instance = inst.name;

    auto accept = [&](Schedule s, Money p) {
        best = std::move(s);
        best_profit = p;
        rep.convergence.push_back({clock.seconds(), p});
    };

    std::uint64_t iter = 0;
    for (;; ++iter) {
        if (params.max_iterations ? iter >= *params.max_iterations : (iter > 0 && clock.seconds() >= params.time_limit))
            break;
        const int d = roulette(weights.destroy, rng);
        const int r = roulette(weights.repair, rng);

        Schedule partial = best;
        if (iter > 0 && !best.empty()) {
            const int n = static_cast<int>(best.size());
            const int k_max = std::min(n, std::max(2, static_cast<int>(std::ceil(params.removal_fraction_max * n))));
            const int k = uniform_int(rng, 1, k_max);
            partial = destroy(best, static_cast<DestroyKind>(d), k, inst, ctx, params, rng);
        }
        Schedule cand = repair(partial, repair_arm(r), inst, params, rng);
        if (iter > 0 && iter % params.reopt_every == 0) cand = reoptimize(cand, inst, params);
        Money p = profit(cand, inst);
        if (p > best_profit + kMoneyTol) {
            cand = reoptimize(cand, inst, params);
            p = profit(cand, inst);
        }

        if (iter == 0) {
            // The repaired initial solution is the first reported point.
            if (p > best_profit + kMoneyTol) accept(std::move(cand), p);
            else rep.convergence.push_back({clock.seconds(), best_profit});
        } else {
            const Money before = best_profit;
            weights.destroy[d] = alns_update(weights.destroy[d], p, before, params.alpha);
            weights.repair[r] = alns_update(weights.repair[r], p, before, params.alpha);
            if (p > before + kMoneyTol) accept(std::move(cand), p);
        }
    }

    rep.iterations = iter;
    set_schedule(rep, inst, best);
    rep.wall_clock_s = clock.seconds();
    return rep;
}

}  // namespace evop
