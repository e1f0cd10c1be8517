#include "evop/model.hpp"

#include <algorithm>
#include <cmath>

namespace evop {

std::string to_string(StationKind kind) {
    switch (kind) {
        case StationKind::grid_station: return "grid_station";
        case StationKind::home_source: return "home_source";
        case StationKind::home_destination: return "home_destination";
    }
    return "grid_station";
}

StationKind station_kind_from_string(const std::string& s) {
    if (s == "grid_station") return StationKind::grid_station;
    if (s == "home_source") return StationKind::home_source;
    if (s == "home_destination") return StationKind::home_destination;
    throw InvalidInstance("unknown station kind '" + s + "'");
}

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw InvalidInstance(what);
}

}  // namespace

void Instance::finalize() {
    require(horizon.valid(), "horizon: slot_minutes must be > 0 and divide 1440");
    const int slots = horizon.slot_count();

    require(travel.avg_speed_kmh > 0.0, "travel: avg_speed_kmh must be > 0");
    require(travel.detour_factor >= 1.0, "travel: detour_factor must be >= 1");

    const auto& ev = query.ev;
    require(ev.efficiency > 0.0, "ev: efficiency must be > 0");
    require(ev.capacity >= 0.0, "ev: capacity must be >= 0");
    require(ev.final_soc_min >= 0.0 && ev.final_soc_min <= ev.capacity, "ev: final_soc_min outside [0, capacity]");
    require(ev.initial_soc >= 0.0 && ev.initial_soc <= ev.capacity, "ev: initial_soc outside [0, capacity]");
    require(query.source.valid() && query.destination.valid(), "query: invalid source/destination location");
    require(query.work_start >= 0.0 && query.work_start < query.work_end && query.work_end <= kMinutesPerDay,
            "query: working hours must satisfy 0 <= start < end <= 1440");

    for (std::size_t i = 0; i < orders.size(); ++i) {
        const Order& o = orders[i];
        const std::string tag = "orders[" + std::to_string(i) + "]: ";
        require(o.id == static_cast<int>(i), tag + "id must equal its position");
        require(o.pickup.valid() && o.dropoff.valid(), tag + "invalid location");
        require(o.window_start < o.window_end, tag + "window_start must be < window_end");
        require(o.fare >= 0.0, tag + "fare must be >= 0");
        require(o.service_distance >= 0.0 && o.service_time >= 0.0, tag + "negative service distance/time");
        require(o.service_distance <= 0.0 || o.service_time > 0.0, tag + "service_time must be > 0 when distance > 0");
        require(o.window_start + o.service_time <= o.window_end, tag + "window too short for the service time");
        require(o.window_start < query.work_end && o.window_end > query.work_start,
                tag + "window does not intersect working hours");
    }

    home_source_ = -1;
    home_destination_ = -1;
    max_charge_price_ = 0.0;
    max_discharge_price_ = 0.0;
    for (std::size_t i = 0; i < stations.size(); ++i) {
        const Station& s = stations[i];
        const std::string tag = "stations[" + std::to_string(i) + "]: ";
        require(s.id == static_cast<int>(i), tag + "id must equal its position");
        require(s.location.valid(), tag + "invalid location");
        require(s.power_kw > 0.0, tag + "power_kw must be > 0");
        require(static_cast<int>(s.tariff.charge_price.size()) == slots &&
                    static_cast<int>(s.tariff.discharge_price.size()) == slots,
                tag + "tariff arrays must have slot_count entries");
        for (int k = 0; k < slots; ++k) {
            require(s.tariff.charge_price[k] >= 0.0 && s.tariff.discharge_price[k] >= 0.0, tag + "negative price");
            max_charge_price_ = std::max(max_charge_price_, s.tariff.charge_price[k]);
            max_discharge_price_ = std::max(max_discharge_price_, s.tariff.discharge_price[k]);
        }
        if (s.kind == StationKind::home_source) {
            require(home_source_ < 0, tag + "more than one home_source station");
            require(s.location == query.source, tag + "home_source must be co-located with the query source");
            home_source_ = static_cast<int>(i);
        } else if (s.kind == StationKind::home_destination) {
            require(home_destination_ < 0, tag + "more than one home_destination station");
            require(s.location == query.destination, tag + "home_destination must be co-located with the query destination");
            home_destination_ = static_cast<int>(i);
        }
    }
    require(home_source_ >= 0, "stations: missing home_source station");
    require(home_destination_ >= 0, "stations: missing home_destination station");
}

bool Instance::operator==(const Instance& other) const {
    return name == other.name && horizon == other.horizon && orders == other.orders && stations == other.stations &&
           query == other.query && travel == other.travel;
}

const Location& entry_location(const Instance& inst, const Action& a) {
    return a.is_serve() ? inst.orders[a.target].pickup : inst.stations[a.target].location;
}

const Location& exit_location(const Instance& inst, const Action& a) {
    return a.is_serve() ? inst.orders[a.target].dropoff : inst.stations[a.target].location;
}

}  // namespace evop
