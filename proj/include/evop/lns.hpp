#ifndef EVOP_LNS_HPP
#define EVOP_LNS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "evop/construct.hpp"
#include "evop/model.hpp"
#include "evop/report.hpp"
#include "evop/rng.hpp"

namespace evop {

struct LnsParams {
    double theta = 0.15;
    int regret_k = 3;
    double rank_power = 5.0;
    double alpha = 0.01;
    double removal_fraction_max = 0.3;
    int max_consecutive_cd = 3;
    int reopt_every = 50;
    double reopt_gap = 0.05;
    double battery_resolution = 0.05;
    double time_limit = 60.0;  // seconds
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> max_iterations;

    void validate() const;
};

enum class DestroyKind { random, worst_profit, closeness, shaw };
enum class OrderInsert { max_profit, regret_k };
enum class CdInsert { closeness, price };

struct RepairArm {
    OrderInsert order = OrderInsert::max_profit;
    CdInsert cd = CdInsert::closeness;
};
/// The four order-insertion x charge-insertion combinations.
RepairArm repair_arm(int index);

struct OperatorWeights {
    std::array<double, 4> destroy{1.0, 1.0, 1.0, 1.0};
    std::array<double, 4> repair{1.0, 1.0, 1.0, 1.0};
};

/// floor(r^m * n) clamped to [0, n-1].
int rank_pick_at(int n, double m, double r);
int rank_random_pick(int n, double m, Rng& rng);

/// alpha * max(S - S_best, 0) + (1 - alpha) * w, kept strictly positive.
double alns_update(double w, Money s, Money s_best, double alpha);
int roulette(const std::array<double, 4>& w, Rng& rng);

/// Instance-wide constants the destroy operators need.
struct LnsContext {
    explicit LnsContext(const Instance& inst);
    double max_order_distance = 1.0;  // km, largest pickup/drop-off separation between two orders
};

/// Per-action removal scores used by worst-profit removal (lower goes first).
std::vector<double> removal_scores(const Schedule& s, const Instance& inst);
/// Shaw relatedness of two actions; 0 for identical actions.
double relatedness(const Action& a, const Action& b, const Instance& inst, const LnsContext& ctx);

/// Drops the action simulate blames until the schedule is feasible again.
Schedule restore_feasibility(Schedule s, const Instance& inst);

/// Removes k actions, then whatever removal broke (a charge that fed a later
/// order, a discharge that made room for a later charge).
Schedule destroy(const Schedule& s, DestroyKind kind, int k, const Instance& inst, const LnsContext& ctx,
                 const LnsParams& params, Rng& rng);

/// Sum over n = 2..k of (I_1 - I_n) over the best k insertion profits; 0 with one position.
Money regret_value(std::vector<Money> profits, int k);

std::optional<Schedule> insert_order(const Schedule& s, OrderInsert strategy, const Instance& inst, const LnsParams& params,
                                     Rng& rng);

/// Direction at a gap: +1 charge, -1 discharge, 0 neither.
int cd_direction(const Timeline& tl, std::size_t p, const Instance& inst, double theta);

struct CdOption {
    int station = 0;
    double key = 0.0;  // ranking key, smaller first
};
/// Stations usable in gap p in the given direction, best first.
std::vector<CdOption> rank_cd_options(const Schedule& s, const Timeline& tl, const Instance& inst, std::size_t p,
                                      CdInsert strategy, int direction);

std::optional<Schedule> insert_cd(const Schedule& s, CdInsert strategy, const Instance& inst, const LnsParams& params,
                                  Rng& rng);

Schedule repair(const Schedule& partial, RepairArm arm, const Instance& inst, const LnsParams& params, Rng& rng);

/// Charge/discharge re-optimization along the schedule's route with the home stations at both ends.
Schedule reoptimize(const Schedule& s, const Instance& inst, const LnsParams& params);

SolverReport run_lns(const Instance& inst, const LnsParams& params);

}  // namespace evop

#endif  // EVOP_LNS_HPP
