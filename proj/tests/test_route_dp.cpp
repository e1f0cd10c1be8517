#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "evop/route_dp.hpp"
#include "evop/simulate.hpp"
#include "helpers.hpp"
#include "route_oracle.hpp"

using namespace evop;
using namespace fixtures;

TEST_SUITE("route_dp") {

TEST_CASE("empty skeleton returns the empty schedule") {
    const Instance inst = base_instance(15, 0.1, 0.5);
    const RouteResult r = optimize_route_schedule(inst, RouteSkeleton{});
    CHECK(r.schedule.empty());
    CHECK(r.profit == 0.0);
}

TEST_CASE("home discharge sells the spare energy in the dearest slots") {
    Instance inst = base_instance(120, 0.5, 0.0);
    auto& prices = inst.stations[1].tariff.discharge_price;
    for (int k = 0; k < 12; ++k) prices[k] = 0.01 * ((k * 5) % 12);
    inst.query.ev.capacity = 60;
    inst.query.ev.initial_soc = 50;
    inst.query.ev.final_soc_min = 4;
    inst.finalize();
    RouteSkeleton skel;
    skel.visits = {Visit::station(1)};
    const RouteResult r = optimize_route_schedule(inst, skel);
    REQUIRE(r.schedule.size() == 1);
    const Action& a = r.schedule.actions[0];
    CHECK(a.kind == ActionKind::discharge);
    const int n = static_cast<int>((50.0 - 4.0) / 14.0);  // three 14 kWh slots
    CHECK(a.slots() == n);

    // The best contiguous run of n slots, found by hand.
    double best = 0;
    for (int b = 0; b + n <= 12; ++b) {
        double s = 0;
        for (int k = b; k < b + n; ++k) s += prices[k];
        best = std::max(best, s);
    }
    CHECK(r.profit == doctest::Approx(best * 14.0));

    MicroRoute mr{inst, skel, 1};
    const OracleResult o = per_slot_oracle(mr);
    REQUIRE(o.best);
    CHECK(r.profit == doctest::Approx(*o.best));
}

TEST_CASE("unreachable order makes the skeleton infeasible") {
    Instance inst = base_instance();
    const Location far = moved(kHome, 400, 0);
    add_order(inst, far, moved(far, 1, 0), 10, 1.3, 5, 540, 560);
    RouteSkeleton skel;
    skel.visits = {Visit::order(0)};
    CHECK_THROWS_AS(optimize_route_schedule(inst, skel), RouteInfeasible);
}

TEST_CASE("skeleton validation") {
    Instance inst = base_instance();
    add_order(inst, kHome, moved(kHome, 1, 0), 3, 1.3, 4, 540, 700);
    RouteSkeleton skel;
    skel.visits = {Visit::order(0), Visit::order(0)};
    CHECK_THROWS_AS(skel.validate(inst), std::invalid_argument);
    skel.visits = {Visit::order(4)};
    CHECK_THROWS_AS(skel.validate(inst), std::invalid_argument);
    skel.visits = {Visit::station(0), Visit::station(0), Visit::station(0)};
    skel.revisits = 1;
    CHECK_THROWS_AS(skel.validate(inst), std::invalid_argument);
    skel.revisits = 2;
    CHECK_NOTHROW(skel.validate(inst));
    DpConfig bad;
    bad.suboptimality_gap = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = DpConfig{};
    bad.battery_resolution = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("state cap raises CapExceeded") {
    const MicroRoute r = micro_route(1);
    DpConfig cfg;
    cfg.max_states = 3;
    CHECK_THROWS_AS(optimize_route_schedule(r.inst, r.skel, cfg), CapExceeded);
}

TEST_CASE("matches per-slot enumeration on micro routes") {
    for (int i = 0; i < 12; ++i) {
        CAPTURE(i);
        const MicroRoute r = micro_route(i);
        const OracleResult o = per_slot_oracle(r);
        CHECK(o.usable_slots <= 12);
        if (!o.best) {
            CHECK_THROWS_AS(optimize_route_schedule(r.inst, r.skel), RouteInfeasible);
            continue;
        }
        const RouteResult dp = optimize_route_schedule(r.inst, r.skel);
        CHECK(simulate(dp.schedule, r.inst).feasible());
        CHECK(dp.profit <= *o.best + 1e-6);
        CHECK(dp.profit >= *o.best - 1e-6 - dp.resolution_bound);
    }
}

TEST_CASE("finer battery grids never lose profit") {
    for (int i = 0; i < 10; ++i) {
        CAPTURE(i);
        const MicroRoute r = micro_route(i);
        if (!per_slot_oracle(r).best) continue;
        Money prev = -1e18;
        for (double res : {0.2, 0.1, 0.05}) {
            DpConfig cfg;
            cfg.battery_resolution = res;
            const RouteResult dp = optimize_route_schedule(r.inst, r.skel, cfg);
            CHECK(dp.profit >= prev - 1e-9);
            prev = dp.profit;
        }
    }
}

TEST_CASE("a warm start is never made worse") {
    for (int i = 0; i < 10; ++i) {
        CAPTURE(i);
        const MicroRoute r = micro_route(i);
        const OracleResult o = per_slot_oracle(r);
        if (!o.best) continue;
        DpConfig cfg;
        cfg.suboptimality_gap = 0.05;
        const RouteResult dp = optimize_route_schedule(r.inst, r.skel, cfg, &o.schedule);
        CHECK(dp.profit >= *o.best - 1e-9);
        CHECK(simulate(dp.schedule, r.inst).feasible());
    }
}

TEST_CASE("from_schedule keeps the action order") {
    const Schedule s{{Action::serve(2), Action::charge(3, 40, 41), Action::serve(0)}};
    const RouteSkeleton k = RouteSkeleton::from_schedule(s, 1);
    REQUIRE(k.visits.size() == 3);
    CHECK(k.visits[0] == Visit::order(2));
    CHECK(k.visits[1] == Visit::station(3));
    CHECK(k.visits[2] == Visit::order(0));
    CHECK(k.revisits == 1);
}

}
