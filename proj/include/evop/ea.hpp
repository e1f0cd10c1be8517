#ifndef EVOP_EA_HPP
#define EVOP_EA_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "evop/model.hpp"
#include "evop/report.hpp"
#include "evop/rng.hpp"

namespace evop {

struct EaParams {
    int population = 2000;
    int tournament = 4;
    double mutation_prob = 0.8;
    int mutation_tries = 10;
    int max_consecutive_cd = 3;
    double time_limit = 60.0;  // seconds
    std::uint64_t seed = 1;
    std::optional<int> max_generations;
    bool parallel = true;

    void validate() const;
};

/// Random feasible order appends, then up to m charge/discharge actions in every gap.
Schedule generate_chromosome(const Instance& inst, int m, Rng& rng);
Schedule generate_chromosome(const Instance& inst, int m, std::uint64_t seed);

class Exhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fittest of n distinct not-yet-chosen members; marks the winner as chosen.
int tournament_select(const std::vector<Money>& fitness, int n, std::vector<char>& chosen, Rng& rng);

using Offspring = std::pair<std::optional<Schedule>, std::optional<Schedule>>;

/// Swaps the tails after cut1 in p1 and cut2 in p2; infeasible children are dropped.
Offspring crossover_at(const Schedule& p1, const Schedule& p2, std::size_t cut1, std::size_t cut2, const Instance& inst);
Offspring crossover(const Schedule& p1, const Schedule& p2, const Instance& inst, Rng& rng);

enum class Mutation { order, charge_discharge, insertion };

/// One random draw of a single mutation strategy; nullopt when infeasible or not applicable.
std::optional<Schedule> mutation_candidate(const Schedule& c, Mutation kind, const Instance& inst, const EaParams& params,
                                           Rng& rng);

/// Applies each strategy with mutation_prob, retrying until the child beats its parent.
Schedule mutate(const Schedule& c, const Instance& inst, const EaParams& params, Rng& rng);

struct Population {
    std::vector<Schedule> members;
    std::vector<Money> fitness;
};

Population initial_population(const Instance& inst, const EaParams& params);
/// One generation: selection, crossover, mutation, truncation to the population size.
Population next_generation(const Population& pop, const Instance& inst, const EaParams& params, int generation);

SolverReport run_ea(const Instance& inst, const EaParams& params);

}  // namespace evop

#endif  // EVOP_EA_HPP
