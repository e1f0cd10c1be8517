#include "evop/metric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace evop {

namespace {
constexpr double kEarthRadiusKm = 6371.0;
constexpr double kDegToRad = std::numbers::pi / 180.0;
}  // namespace

Km haversine_km(const Location& a, const Location& b) {
    if (a == b) return 0.0;
    const double dlat = (b.lat - a.lat) * kDegToRad;
    const double dlon = (b.lon - a.lon) * kDegToRad;
    const double s1 = std::sin(dlat / 2.0);
    const double s2 = std::sin(dlon / 2.0);
    const double h = s1 * s1 + std::cos(a.lat * kDegToRad) * std::cos(b.lat * kDegToRad) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

Leg travel(const Location& a, const Location& b, const TravelParams& params) {
    const Km d = haversine_km(a, b) * params.detour_factor;
    return {d, d / params.avg_speed_kmh * 60.0};
}

Money order_fare(Km distance, Minutes time, const FareParams& params) {
    return params.driver_share * (params.base + params.per_km * distance + params.per_min * time);
}

Money energy_penalty(const Location& a, const Location& b, const Instance& inst) {
    return energy(travel(a, b, inst).distance, inst.query.ev) * inst.max_charge_price();
}

}  // namespace evop
