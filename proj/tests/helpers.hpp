// Shared fixtures: hand-built micro instances and the seeded instance families.
#ifndef EVOP_TESTS_HELPERS_HPP
#define EVOP_TESTS_HELPERS_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include "evop/instance_gen.hpp"
#include "evop/metric.hpp"
#include "evop/model.hpp"
#include "evop/rng.hpp"

namespace fixtures {

using namespace evop;

inline constexpr Location kHome{-37.80, 145.00};

/// Point moved north/east by the given great-circle kilometres (exact along a meridian).
inline Location moved(const Location& from, double north_km, double east_km) {
    constexpr double R = 6371.0;
    Location out = from;
    out.lat += north_km / R * 180.0 / std::numbers::pi;
    out.lon += east_km / (R * std::cos(out.lat * std::numbers::pi / 180.0)) * 180.0 / std::numbers::pi;
    return out;
}

inline Tariff flat_tariff(const Horizon& h, double charge, double discharge) {
    return {std::vector<double>(h.slot_count(), charge), std::vector<double>(h.slot_count(), discharge)};
}

/// Source = destination = kHome, two 7 kW home stations with flat prices, no orders.
inline Instance base_instance(int slot_minutes = 15, double home_charge = 0.30, double home_discharge = 0.0) {
    Instance inst;
    inst.name = "micro";
    inst.horizon.slot_minutes = slot_minutes;
    inst.query.source = kHome;
    inst.query.destination = kHome;
    inst.query.work_start = 540;
    inst.query.work_end = 1020;
    inst.query.ev = {70.0, 0.175, 35.0, 0.0};
    const Tariff t = flat_tariff(inst.horizon, home_charge, home_discharge);
    inst.stations.push_back({0, kHome, 7.0, t, StationKind::home_source});
    inst.stations.push_back({1, kHome, 7.0, t, StationKind::home_destination});
    inst.finalize();
    return inst;
}

inline int add_station(Instance& inst, const Location& at, double kw, const Tariff& t) {
    const int id = static_cast<int>(inst.stations.size());
    inst.stations.push_back({id, at, kw, t, StationKind::grid_station});
    inst.finalize();
    return id;
}

inline int add_order(Instance& inst, const Location& pickup, const Location& dropoff, double fare, double dist,
                     double minutes, double ws, double we) {
    const int id = static_cast<int>(inst.orders.size());
    inst.orders.push_back({id, pickup, dropoff, fare, dist, minutes, ws, we});
    inst.finalize();
    return id;
}

/// Tiny family: up to 4 orders, one grid station, 30 minute slots, small battery
/// so charging decisions matter.
inline Instance tiny_instance(int i) {
    GenParams p;
    p.seed = 1000 + static_cast<std::uint64_t>(i);
    Rng rng(p.seed);
    p.n_orders = 1 + i % 4;
    p.n_stations = 1;
    p.slot_minutes = 30;
    p.bbox_fraction = 0.10;
    p.ride_bucket = RideBucket::short_5_10;
    p.period = Period::five_hours;
    p.ev.capacity = 14.0;
    p.ev.initial_soc = p.ev.capacity * (0.3 + 0.7 * uniform01(rng));
    p.ev.final_soc_min = 0.2 * p.ev.capacity;
    Instance inst = generate(p);
    inst.stations[2].power_kw = (i % 2) ? 7.0 : 22.0;
    inst.finalize();
    return inst;
}

/// 6 orders and 2 grid stations.
inline GenParams small_params(int i) {
    GenParams p;
    p.seed = 2000 + static_cast<std::uint64_t>(i);
    p.n_orders = 6;
    p.n_stations = 2;
    return p;
}

/// 300 orders and 20 grid stations.
inline GenParams large_params(int i) {
    GenParams p;
    p.seed = 3000 + static_cast<std::uint64_t>(i);
    p.n_orders = 300;
    p.n_stations = 20;
    return p;
}

}  // namespace fixtures

#endif  // EVOP_TESTS_HELPERS_HPP
