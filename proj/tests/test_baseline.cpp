#include <doctest.h>

#include "evop/baseline.hpp"
#include "evop/simulate.hpp"
#include "helpers.hpp"

using namespace evop;
using namespace fixtures;

TEST_SUITE("baseline") {

TEST_CASE("without orders the greedy only sells at home") {
    const Instance inst = base_instance(30, 0.30, 0.20);
    const SolverReport r = solve_baseline(inst);
    CHECK(r.feasible);
    CHECK(r.schedule.size() <= 1);
    for (const Action& a : r.schedule.actions) {
        CHECK(a.kind == ActionKind::discharge);
        CHECK(a.target == inst.home_destination());
    }
    CHECK(r.total_profit >= 0.0);
    CHECK(r.order_profit == 0.0);
}

TEST_CASE("generated instances give feasible schedules") {
    for (int i = 0; i < 5; ++i) {
        CAPTURE(i);
        GenParams p = small_params(i);
        p.n_orders = 20 + 20 * i;
        p.n_stations = 5;
        const Instance inst = generate(p);
        BaselineParams bp;
        bp.seed = 9 + i;
        const SolverReport r = solve_baseline(inst, bp);
        REQUIRE(r.feasible);
        CHECK(simulate(r.schedule, inst).feasible());
        CHECK(r.total_profit == doctest::Approx(profit(r.schedule, inst)));
        CHECK(r.order_profit > 0.0);
        REQUIRE(r.convergence.size() == 1);
        CHECK(r.convergence[0].profit == r.total_profit);
    }
}

TEST_CASE("same seed, same schedule") {
    const Instance inst = generate(small_params(3));
    BaselineParams bp;
    bp.seed = 42;
    CHECK(solve_baseline(inst, bp).schedule == solve_baseline(inst, bp).schedule);
}

TEST_CASE("a low battery triggers a charge") {
    Instance inst = base_instance(15, 0.30, 0.0);
    inst.query.ev.initial_soc = 8.0;
    inst.finalize();
    for (int i = 0; i < 6; ++i) {
        const Location p = moved(kHome, 0.3 * i, 0.2);
        add_order(inst, p, moved(p, 8.0 / 1.3, 0), 25.0, 8.0, 15.0, 560 + 60 * i, 640 + 60 * i);
    }
    add_station(inst, moved(kHome, 1, 0), 22.0, flat_tariff(inst.horizon, 0.20, 0.0));
    const SolverReport r = solve_baseline(inst);
    REQUIRE(r.feasible);
    bool charged = false;
    for (const Action& a : r.schedule.actions) charged = charged || a.kind == ActionKind::charge;
    CHECK(charged);
}

TEST_CASE("an instance whose empty route is infeasible is rejected") {
    Instance inst = base_instance();
    inst.query.ev.final_soc_min = 34.0;
    inst.query.destination = moved(kHome, 30, 0);
    inst.stations[1].location = inst.query.destination;
    inst.finalize();
    REQUIRE_FALSE(simulate(Schedule{}, inst).feasible());
    CHECK_THROWS_AS(solve_baseline(inst), NoFeasibleSolution);
}

}
