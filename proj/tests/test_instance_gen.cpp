#include <doctest.h>

#include <algorithm>

#include "evop/instance_gen.hpp"
#include "evop/io.hpp"
#include "evop/simulate.hpp"

using namespace evop;

TEST_SUITE("instance_gen") {

TEST_CASE("same seed gives byte-identical JSON") {
    GenParams p;
    p.seed = 42;
    CHECK(dump(to_json(generate(p))) == dump(to_json(generate(p))));
    GenParams q = p;
    q.seed = 43;
    CHECK(dump(to_json(generate(p))) != dump(to_json(generate(q))));
}

TEST_CASE("ride distances stay inside the bucket") {
    for (auto b : {RideBucket::short_5_10, RideBucket::medium_10_25, RideBucket::long_25_plus}) {
        GenParams p;
        p.n_orders = 200;
        p.ride_bucket = b;
        const auto [lo, hi] = bucket_range(b);
        for (const Order& o : generate(p).orders) {
            CHECK(o.service_distance >= lo);
            CHECK(o.service_distance <= hi);
        }
    }
    CHECK(bucket_range(RideBucket::medium_10_25) == std::pair{10.0, 25.0});
}

TEST_CASE("order windows lie inside the period") {
    const std::pair<Period, double> cases[] = {
        {Period::two_hours, 660}, {Period::five_hours, 840}, {Period::eight_hours, 1020}};
    for (const auto& [period, end] : cases) {
        GenParams p;
        p.n_orders = 200;
        p.period = period;
        for (const Order& o : generate(p).orders) {
            CHECK(o.window_start >= 540.0);
            CHECK(o.window_end <= end + 1e-9);
            CHECK(o.window_end - o.window_start >= std::min(o.service_time + 30.0, end - 540.0) - 1e-9);
            CHECK(o.service_time > 0.0);
        }
    }
}

TEST_CASE("stations, homes and tariffs follow the templates") {
    GenParams p;
    p.n_stations = 30;
    const Instance inst = generate(p);
    const TariffTemplate t;
    REQUIRE(inst.stations.size() == 32);
    CHECK(inst.stations[0].kind == StationKind::home_source);
    CHECK(inst.stations[1].kind == StationKind::home_destination);
    CHECK(inst.stations[0].location == inst.query.source);
    CHECK(inst.query.source == inst.query.destination);
    const int slots = inst.horizon.slot_count();
    for (int k = 0; k < slots; ++k) {
        const double minute = inst.horizon.slot_start(k);
        CHECK(inst.stations[0].tariff.charge_price[k] == t.charge_at(minute));
        CHECK(inst.stations[1].tariff.discharge_price[k] == t.discharge_at(minute));
    }
    CHECK(t.charge_at(15 * 60) == 0.412);
    CHECK(t.charge_at(14 * 60) == 0.2665);
    CHECK(t.discharge_at(16 * 60) == 0.117);
    CHECK(t.discharge_at(12 * 60) == 0.043);
    CHECK(t.discharge_at(22 * 60) == 0.061);
    for (std::size_t i = 2; i < inst.stations.size(); ++i) {
        const Station& s = inst.stations[i];
        CHECK(s.kind == StationKind::grid_station);
        const double kw = s.power_kw;
        CHECK((kw == 7.0 || kw == 22.0 || kw == 50.0 || kw == 120.0));
        const double f = s.tariff.charge_price[0] / t.charge_at(0);
        CHECK(f >= 0.9 - 1e-12);
        CHECK(f <= 1.1 + 1e-12);
        for (int k = 0; k < slots; ++k)
            CHECK(s.tariff.discharge_price[k] == doctest::Approx(f * t.discharge_at(inst.horizon.slot_start(k))));
    }
}

TEST_CASE("source and orders fall inside the scaled box") {
    GenParams p;
    p.bbox_fraction = 0.1;
    p.n_orders = 100;
    const BoundingBox box = p.region.scaled(p.bbox_fraction);
    const Instance inst = generate(p);
    auto inside = [&](const Location& l) {
        return l.lat >= box.lat_min && l.lat <= box.lat_max && l.lon >= box.lon_min && l.lon <= box.lon_max;
    };
    CHECK(inside(inst.query.source));
    for (const Order& o : inst.orders) CHECK(inside(o.pickup));
    const double area = (box.lat_max - box.lat_min) * (box.lon_max - box.lon_min);
    const double full = (p.region.lat_max - p.region.lat_min) * (p.region.lon_max - p.region.lon_min);
    CHECK(area / full == doctest::Approx(0.1));
}

TEST_CASE("every generated instance admits the empty schedule") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        GenParams p;
        p.seed = seed;
        p.n_orders = 5;
        CHECK(simulate(Schedule{}, generate(p)).feasible());
    }
}

TEST_CASE("invalid parameters are rejected") {
    GenParams p;
    p.n_orders = 0;
    CHECK_THROWS_AS(generate(p), InvalidParams);
    p = GenParams{};
    p.bbox_fraction = 0.0;
    CHECK_THROWS_AS(generate(p), InvalidParams);
    CHECK_THROWS_AS(ride_bucket_from_string("3-4"), InvalidParams);
    CHECK(period_from_string("5h") == Period::five_hours);
    CHECK(ride_bucket_from_string("25+") == RideBucket::long_25_plus);
}

TEST_CASE("price scaling") {
    GenParams p;
    p.n_orders = 10;
    const Instance inst = generate(p);
    CHECK(scale_prices(inst, 1, 1, 1) == inst);

    const Instance tripled = scale_prices(inst, 3, 3, 1);
    for (std::size_t i = 0; i < inst.stations.size(); ++i) {
        CHECK(tripled.stations[i].power_kw == doctest::Approx(3 * inst.stations[i].power_kw));
        for (std::size_t k = 0; k < inst.stations[i].tariff.charge_price.size(); ++k) {
            CHECK(tripled.stations[i].tariff.charge_price[k] == doctest::Approx(3 * inst.stations[i].tariff.charge_price[k]));
            CHECK(tripled.stations[i].tariff.discharge_price[k] ==
                  doctest::Approx(3 * inst.stations[i].tariff.discharge_price[k]));
        }
    }
    CHECK(tripled.orders == inst.orders);

    const Instance halved = scale_prices(inst, 1, 1, 0.5);
    for (std::size_t i = 0; i < inst.orders.size(); ++i) CHECK(halved.orders[i].fare == doctest::Approx(inst.orders[i].fare / 2));

    const Instance a = scale_prices(scale_prices(inst, 2, 0.5, 3), 1.5, 4, 0.2);
    const Instance b = scale_prices(inst, 3, 2, 0.6);
    for (std::size_t i = 0; i < inst.stations.size(); ++i) {
        CHECK(std::abs(a.stations[i].power_kw - b.stations[i].power_kw) < 1e-9);
        for (std::size_t k = 0; k < inst.stations[i].tariff.charge_price.size(); ++k)
            CHECK(std::abs(a.stations[i].tariff.charge_price[k] - b.stations[i].tariff.charge_price[k]) < 1e-9);
    }
    for (std::size_t i = 0; i < inst.orders.size(); ++i) CHECK(std::abs(a.orders[i].fare - b.orders[i].fare) < 1e-9);
    CHECK_THROWS_AS(scale_prices(inst, 0, 1, 1), InvalidParams);
}

}
