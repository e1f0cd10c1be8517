#include "evop/ea.hpp"

#include <algorithm>
#include <numeric>

#include "evop/construct.hpp"
#include "evop/metric.hpp"
#include "evop/simulate.hpp"

namespace evop {

namespace {

constexpr double kTimeTol = 1e-6;

std::optional<Money> fitness_of(const Schedule& s, const Instance& inst) {
    const SimResult r = simulate(s, inst);
    if (!r.feasible()) return std::nullopt;
    return r.trace.total_money();
}

}  // namespace

void EaParams::validate() const {
    if (population < 2) throw std::invalid_argument("ea: population must be >= 2");
    if (tournament < 2) throw std::invalid_argument("ea: tournament size must be >= 2");
    if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) throw std::invalid_argument("ea: mutation_prob outside [0, 1]");
    if (mutation_tries < 1) throw std::invalid_argument("ea: mutation_tries must be >= 1");
    if (max_consecutive_cd < 0) throw std::invalid_argument("ea: max_consecutive_cd must be >= 0");
    if (time_limit < 0.0) throw std::invalid_argument("ea: time_limit must be >= 0");
}

Schedule generate_chromosome(const Instance& inst, int m, Rng& rng) {
    const auto& ev = inst.query.ev;
    Schedule s;
    std::vector<char> served(inst.orders.size(), 0);
    Minutes now = 0.0;
    Kwh battery = ev.initial_soc;
    const Location* here = &inst.query.source;
    std::vector<int> options;
    for (;;) {
        options.clear();
        for (std::size_t i = 0; i < inst.orders.size(); ++i) {
            if (served[i]) continue;
            const Order& o = inst.orders[i];
            const Leg leg = travel(*here, o.pickup, inst);
            const Minutes start = std::max({now + leg.time, o.window_start, inst.query.work_start});
            if (start > o.window_end + kTimeTol ||
                start + o.service_time > std::min(o.window_end, inst.query.work_end) + kTimeTol)
                continue;
            const Kwh left = battery - energy(leg.distance, ev) - energy(o.service_distance, ev);
            if (left < reserve_from(o.dropoff, inst) - kBatteryTol) continue;
            options.push_back(static_cast<int>(i));
        }
        if (options.empty()) break;
        const int pick = options[uniform_int(rng, 0, static_cast<int>(options.size()) - 1)];
        const Order& o = inst.orders[pick];
        const Leg leg = travel(*here, o.pickup, inst);
        now = std::max({now + leg.time, o.window_start, inst.query.work_start}) + o.service_time;
        battery -= energy(leg.distance, ev) + energy(o.service_distance, ev);
        here = &o.dropoff;
        served[pick] = 1;
        s.actions.push_back(Action::serve(pick));
    }

    // Gaps are filled back to front so earlier positions stay valid.
    for (std::size_t p = s.size() + 1; p-- > 0;) {
        const int count = uniform_int(rng, 0, m);
        for (int j = 0; j < count; ++j) {
            const auto tl = Timeline::build(s, inst);
            if (!tl) break;
            auto grown = random_cd_insert(s, *tl, inst, p + static_cast<std::size_t>(j), rng);
            if (!grown) break;
            s = std::move(*grown);
        }
    }
    return s;
}

Schedule generate_chromosome(const Instance& inst, int m, std::uint64_t seed) {
    Rng rng(seed);
    return generate_chromosome(inst, m, rng);
}

int tournament_select(const std::vector<Money>& fitness, int n, std::vector<char>& chosen, Rng& rng) {
    std::vector<int> eligible;
    for (std::size_t i = 0; i < fitness.size(); ++i)
        if (!chosen[i]) eligible.push_back(static_cast<int>(i));
    if (eligible.empty()) throw Exhausted("tournament: every member was already chosen this generation");
    const int draw = std::min<int>(n, static_cast<int>(eligible.size()));
    int winner = -1;
    for (int i = 0; i < draw; ++i) {
        const int j = uniform_int(rng, i, static_cast<int>(eligible.size()) - 1);
        std::swap(eligible[i], eligible[j]);
        const int c = eligible[i];
        if (winner < 0 || fitness[c] > fitness[winner] || (fitness[c] == fitness[winner] && c < winner)) winner = c;
    }
    chosen[winner] = 1;
    return winner;
}

Offspring crossover_at(const Schedule& p1, const Schedule& p2, std::size_t cut1, std::size_t cut2, const Instance& inst) {
    Schedule a, b;
    a.actions.assign(p1.actions.begin(), p1.actions.begin() + static_cast<std::ptrdiff_t>(cut1));
    a.actions.insert(a.actions.end(), p2.actions.begin() + static_cast<std::ptrdiff_t>(cut2), p2.actions.end());
    b.actions.assign(p2.actions.begin(), p2.actions.begin() + static_cast<std::ptrdiff_t>(cut2));
    b.actions.insert(b.actions.end(), p1.actions.begin() + static_cast<std::ptrdiff_t>(cut1), p1.actions.end());
    Offspring out;
    if (simulate(a, inst).feasible()) out.first = std::move(a);
    if (simulate(b, inst).feasible()) out.second = std::move(b);
    return out;
}

Offspring crossover(const Schedule& p1, const Schedule& p2, const Instance& inst, Rng& rng) {
    const auto cut1 = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(p1.size())));
    const auto cut2 = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(p2.size())));
    return crossover_at(p1, p2, cut1, cut2, inst);
}

std::optional<Schedule> mutation_candidate(const Schedule& c, Mutation kind, const Instance& inst, const EaParams& params,
                                           Rng& rng) {
    const std::vector<char> served = served_mask(c, inst);
    switch (kind) {
        case Mutation::order: {
            std::vector<std::size_t> slots;
            for (std::size_t i = 0; i < c.size(); ++i)
                if (c.actions[i].is_serve()) slots.push_back(i);
            if (slots.empty()) return std::nullopt;
            const std::size_t i = slots[uniform_int(rng, 0, static_cast<int>(slots.size()) - 1)];
            const Order& old = inst.orders[c.actions[i].target];
            std::vector<int> alike;
            for (std::size_t o = 0; o < inst.orders.size(); ++o) {
                const Order& cand = inst.orders[o];
                if (!served[o] && cand.window_start < old.window_end && old.window_start < cand.window_end)
                    alike.push_back(static_cast<int>(o));
            }
            if (alike.empty()) return std::nullopt;
            Schedule out = c;
            out.actions[i] = Action::serve(alike[uniform_int(rng, 0, static_cast<int>(alike.size()) - 1)]);
            if (!simulate(out, inst).feasible()) return std::nullopt;
            return out;
        }
        case Mutation::charge_discharge: {
            std::vector<std::size_t> slots;
            for (std::size_t i = 0; i < c.size(); ++i)
                if (c.actions[i].is_energy()) slots.push_back(i);
            if (slots.empty()) return std::nullopt;
            const std::size_t i = slots[uniform_int(rng, 0, static_cast<int>(slots.size()) - 1)];
            Schedule out = c;
            out.actions.erase(out.actions.begin() + static_cast<std::ptrdiff_t>(i));
            const auto tl = Timeline::build(out, inst);
            if (!tl) return std::nullopt;
            return random_cd_insert(out, *tl, inst, i, rng);
        }
        case Mutation::insertion: {
            std::vector<int> free;
            for (std::size_t o = 0; o < inst.orders.size(); ++o)
                if (!served[o]) free.push_back(static_cast<int>(o));
            if (free.empty()) return std::nullopt;
            const int o = free[uniform_int(rng, 0, static_cast<int>(free.size()) - 1)];
            const int pos = uniform_int(rng, 0, static_cast<int>(c.size()));
            Schedule out = c;
            out.actions.insert(out.actions.begin() + pos, Action::serve(o));
            if (!simulate(out, inst).feasible()) return std::nullopt;
            return out;
        }
    }
    (void)params;
    return std::nullopt;
}

Schedule mutate(const Schedule& c, const Instance& inst, const EaParams& params, Rng& rng) {
    Schedule cur = c;
    auto fit = fitness_of(cur, inst);
    if (!fit) return cur;
    for (Mutation kind : {Mutation::order, Mutation::charge_discharge, Mutation::insertion}) {
        if (!coin(rng, params.mutation_prob)) continue;
        for (int t = 0; t < params.mutation_tries; ++t) {
            auto cand = mutation_candidate(cur, kind, inst, params, rng);
            if (!cand) continue;
            const auto f = fitness_of(*cand, inst);
            if (f && *f > *fit + 1e-9) {
                cur = std::move(*cand);
                fit = f;
                break;
            }
        }
    }
    return cur;
}

Population initial_population(const Instance& inst, const EaParams& params) {
    Population pop;
    const int k = params.population;
    pop.members.resize(k);
    pop.fitness.resize(k);
#pragma omp parallel for schedule(dynamic, 8) if (params.parallel)
    for (int i = 0; i < k; ++i) {
        Rng rng(derive_seed(params.seed, 0, static_cast<std::uint64_t>(i)));
        pop.members[i] = generate_chromosome(inst, params.max_consecutive_cd, rng);
        pop.fitness[i] = fitness_of(pop.members[i], inst).value_or(0.0);
    }
    return pop;
}

Population next_generation(const Population& pop, const Instance& inst, const EaParams& params, int generation) {
    const int k = static_cast<int>(pop.members.size());
    const auto gen = static_cast<std::uint64_t>(generation);
    Rng select_rng(derive_seed(params.seed, gen, ~0ULL));
    std::vector<char> chosen(k, 0);
    const int pairs = std::max(1, k / 4);
    std::vector<std::pair<int, int>> parents;
    for (int i = 0; i < pairs; ++i) {
        const int a = tournament_select(pop.fitness, params.tournament, chosen, select_rng);
        const int b = tournament_select(pop.fitness, params.tournament, chosen, select_rng);
        parents.emplace_back(a, b);
    }

    std::vector<Schedule> kids(2 * parents.size());
    std::vector<Money> kid_fit(kids.size());
#pragma omp parallel for schedule(dynamic, 4) if (params.parallel)
    for (int i = 0; i < static_cast<int>(parents.size()); ++i) {
        Rng rng(derive_seed(params.seed, gen, static_cast<std::uint64_t>(i)));
        const auto [a, b] = parents[i];
        Offspring off = crossover(pop.members[a], pop.members[b], inst, rng);
        Schedule first = off.first ? std::move(*off.first) : pop.members[a];
        Schedule second = off.second ? std::move(*off.second) : pop.members[b];
        kids[2 * i] = mutate(first, inst, params, rng);
        kids[2 * i + 1] = mutate(second, inst, params, rng);
        kid_fit[2 * i] = fitness_of(kids[2 * i], inst).value_or(0.0);
        kid_fit[2 * i + 1] = fitness_of(kids[2 * i + 1], inst).value_or(0.0);
    }

    const std::size_t total = pop.members.size() + kids.size();
    std::vector<std::size_t> idx(total);
    std::iota(idx.begin(), idx.end(), 0);
    auto fit_at = [&](std::size_t i) { return i < pop.fitness.size() ? pop.fitness[i] : kid_fit[i - pop.fitness.size()]; };
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fit_at(a) > fit_at(b); });
    Population out;
    out.members.reserve(k);
    out.fitness.reserve(k);
    for (int i = 0; i < k && i < static_cast<int>(total); ++i) {
        const std::size_t j = idx[i];
        out.members.push_back(j < pop.members.size() ? pop.members[j] : kids[j - pop.members.size()]);
        out.fitness.push_back(fit_at(j));
    }
    return out;
}

SolverReport run_ea(const Instance& inst, const EaParams& params) {
    params.validate();
    Stopwatch clock;
    Population pop = initial_population(inst, params);
    SolverReport rep;
    rep.algo = "ea";
    rep.seed = params.seed;
    rep.instance = inst.name;

    auto best_index = [](const Population& p) {
        return static_cast<std::size_t>(std::max_element(p.fitness.begin(), p.fitness.end()) - p.fitness.begin());
    };
    std::size_t b = best_index(pop);
    Schedule best = pop.members[b];
    Money best_fit = pop.fitness[b];
    rep.convergence.push_back({clock.seconds(), best_fit});

    int generation = 0;
    while (clock.seconds() < params.time_limit && (!params.max_generations || generation < *params.max_generations)) {
        ++generation;
        pop = next_generation(pop, inst, params, generation);
        b = best_index(pop);
        if (pop.fitness[b] > best_fit + 1e-9) {
            best_fit = pop.fitness[b];
            best = pop.members[b];
            rep.convergence.push_back({clock.seconds(), best_fit});
        }
    }
    rep.iterations = static_cast<std::uint64_t>(generation);
    set_schedule(rep, inst, best);
    rep.wall_clock_s = clock.seconds();
    return rep;
}

}  // namespace evop
