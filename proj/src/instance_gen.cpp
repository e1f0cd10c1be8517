#include "evop/instance_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "evop/rng.hpp"

namespace evop {

RideBucket ride_bucket_from_string(const std::string& s) {
    if (s == "5-10") return RideBucket::short_5_10;
    if (s == "10-25") return RideBucket::medium_10_25;
    if (s == "25+" || s == ">25") return RideBucket::long_25_plus;
    throw InvalidParams("unknown ride bucket '" + s + "' (expected 5-10, 10-25 or 25+)");
}

Period period_from_string(const std::string& s) {
    if (s == "2h") return Period::two_hours;
    if (s == "5h") return Period::five_hours;
    if (s == "8h") return Period::eight_hours;
    throw InvalidParams("unknown period '" + s + "' (expected 2h, 5h or 8h)");
}

std::string to_string(RideBucket b) {
    switch (b) {
        case RideBucket::short_5_10: return "5-10";
        case RideBucket::medium_10_25: return "10-25";
        case RideBucket::long_25_plus: return "25+";
    }
    return "10-25";
}

std::string to_string(Period p) {
    switch (p) {
        case Period::two_hours: return "2h";
        case Period::five_hours: return "5h";
        case Period::eight_hours: return "8h";
    }
    return "8h";
}

std::pair<double, double> bucket_range(RideBucket b) {
    switch (b) {
        case RideBucket::short_5_10: return {5.0, 10.0};
        case RideBucket::medium_10_25: return {10.0, 25.0};
        case RideBucket::long_25_plus: return {25.0, 40.0};
    }
    return {10.0, 25.0};
}

std::pair<double, double> period_range(Period p) {
    switch (p) {
        case Period::two_hours: return {540.0, 660.0};
        case Period::five_hours: return {540.0, 840.0};
        case Period::eight_hours: return {540.0, 1020.0};
    }
    return {540.0, 1020.0};
}

BoundingBox BoundingBox::scaled(double fraction) const {
    const double side = std::sqrt(fraction);
    const double clat = 0.5 * (lat_min + lat_max);
    const double clon = 0.5 * (lon_min + lon_max);
    const double hlat = 0.5 * (lat_max - lat_min) * side;
    const double hlon = 0.5 * (lon_max - lon_min) * side;
    return {clat - hlat, clat + hlat, clon - hlon, clon + hlon};
}

double TariffTemplate::charge_at(double minute) const {
    return (minute >= 900.0 && minute < 1260.0) ? tou_peak : tou_offpeak;
}

double TariffTemplate::discharge_at(double minute) const {
    if (minute >= 960.0 && minute < 1260.0) return fit_peak;
    if (minute >= 600.0 && minute < 840.0) return fit_offpeak;
    return fit_shoulder;
}

void GenParams::validate() const {
    if (n_orders < 1) throw InvalidParams("n_orders must be >= 1");
    if (n_stations < 1) throw InvalidParams("n_stations must be >= 1");
    if (!(bbox_fraction > 0.0 && bbox_fraction <= 1.0)) throw InvalidParams("bbox_fraction must be in (0, 1]");
    if (slot_minutes <= 0 || kMinutesPerDay % slot_minutes != 0)
        throw InvalidParams("slot_minutes must be > 0 and divide 1440");
    if (!(region.lat_min < region.lat_max && region.lon_min < region.lon_max)) throw InvalidParams("empty region");
    if (!(work_start >= 0.0 && work_start < work_end && work_end <= kMinutesPerDay))
        throw InvalidParams("working hours must satisfy 0 <= start < end <= 1440");
    const auto [p0, p1] = period_range(period);
    if (p0 >= work_end || p1 <= work_start) throw InvalidParams("order period does not intersect working hours");
    if (home_power_kw <= 0.0 || travel.avg_speed_kmh <= 0.0 || travel.detour_factor < 1.0)
        throw InvalidParams("invalid power or travel parameters");
    if (station_price_jitter < 0.0 || station_price_jitter >= 1.0) throw InvalidParams("price jitter must be in [0, 1)");
}

namespace {

Location uniform_point(Rng& rng, const BoundingBox& box) {
    return {uniform_real(rng, box.lat_min, box.lat_max), uniform_real(rng, box.lon_min, box.lon_max)};
}

/// Point reached by travelling `km` along `bearing` on the sphere.
Location offset(const Location& from, double km, double bearing) {
    constexpr double r = 6371.0;
    const double d2r = std::numbers::pi / 180.0;
    const double lat1 = from.lat * d2r;
    const double lon1 = from.lon * d2r;
    const double ang = km / r;
    const double lat2 = std::asin(std::sin(lat1) * std::cos(ang) + std::cos(lat1) * std::sin(ang) * std::cos(bearing));
    const double lon2 =
        lon1 + std::atan2(std::sin(bearing) * std::sin(ang) * std::cos(lat1), std::cos(ang) - std::sin(lat1) * std::sin(lat2));
    Location out{lat2 / d2r, lon2 / d2r};
    out.lat = std::clamp(out.lat, -90.0, 90.0);
    out.lon = std::clamp(out.lon, -180.0, 180.0);
    return out;
}

Tariff make_tariff(const TariffTemplate& t, const Horizon& h, double factor) {
    Tariff out;
    const int n = h.slot_count();
    out.charge_price.resize(n);
    out.discharge_price.resize(n);
    for (int k = 0; k < n; ++k) {
        const double minute = h.slot_start(k);
        out.charge_price[k] = t.charge_at(minute) * factor;
        out.discharge_price[k] = t.discharge_at(minute) * factor;
    }
    return out;
}

}  // namespace

Instance generate(const GenParams& p) {
    p.validate();
    Rng rng(p.seed);

    Instance inst;
    inst.name = "gen-s" + std::to_string(p.seed) + "-o" + std::to_string(p.n_orders) + "-c" +
                std::to_string(p.n_stations) + "-" + to_string(p.period) + "-" + to_string(p.ride_bucket);
    inst.horizon.slot_minutes = p.slot_minutes;
    inst.travel = p.travel;
    inst.query.ev = p.ev;
    inst.query.work_start = p.work_start;
    inst.query.work_end = p.work_end;

    const BoundingBox box = p.region.scaled(p.bbox_fraction);
    const Location home = uniform_point(rng, box);
    inst.query.source = home;
    inst.query.destination = home;

    const auto [dmin, dmax] = bucket_range(p.ride_bucket);
    const auto [pstart, pend] = period_range(p.period);
    const double plen = pend - pstart;
    for (int i = 0; i < p.n_orders; ++i) {
        Order o;
        o.id = i;
        o.pickup = uniform_point(rng, box);
        o.service_distance = uniform_real(rng, dmin, dmax);
        const double bearing = uniform_real(rng, 0.0, 2.0 * std::numbers::pi);
        o.dropoff = offset(o.pickup, o.service_distance / p.travel.detour_factor, bearing);
        o.service_time = o.service_distance / p.travel.avg_speed_kmh * 60.0 * uniform_real(rng, 0.8, 1.2);
        const double width = std::min(plen, o.service_time + 30.0 + uniform_real(rng, 0.0, 30.0));
        o.window_start = pstart + uniform_real(rng, 0.0, plen - width);
        o.window_end = o.window_start + width;
        o.fare = order_fare(o.service_distance, o.service_time, p.fare);
        inst.orders.push_back(o);
    }

    const Tariff home_tariff = make_tariff(p.tariff, inst.horizon, 1.0);
    inst.stations.push_back({0, home, p.home_power_kw, home_tariff, StationKind::home_source});
    inst.stations.push_back({1, home, p.home_power_kw, home_tariff, StationKind::home_destination});
    constexpr double kPowers[] = {7.0, 22.0, 50.0, 120.0};
    for (int i = 0; i < p.n_stations; ++i) {
        Station s;
        s.id = static_cast<int>(inst.stations.size());
        s.location = uniform_point(rng, p.region);
        s.power_kw = kPowers[uniform_int(rng, 0, 3)];
        const double factor = uniform_real(rng, 1.0 - p.station_price_jitter, 1.0 + p.station_price_jitter);
        s.tariff = make_tariff(p.tariff, inst.horizon, factor);
        s.kind = StationKind::grid_station;
        inst.stations.push_back(std::move(s));
    }

    inst.finalize();
    return inst;
}

Instance scale_prices(const Instance& inst, double price_factor, double power_factor, double fare_factor) {
    if (!(price_factor > 0.0 && power_factor > 0.0 && fare_factor > 0.0))
        throw InvalidParams("scaling factors must be > 0");
    Instance out = inst;
    for (Station& s : out.stations) {
        for (double& v : s.tariff.charge_price) v *= price_factor;
        for (double& v : s.tariff.discharge_price) v *= price_factor;
        s.power_kw *= power_factor;
    }
    for (Order& o : out.orders) o.fare *= fare_factor;
    out.finalize();
    return out;
}

}  // namespace evop
