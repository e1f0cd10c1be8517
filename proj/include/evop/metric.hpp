#ifndef EVOP_METRIC_HPP
#define EVOP_METRIC_HPP

#include "evop/model.hpp"

namespace evop {

struct Leg {
    Km distance = 0.0;
    Minutes time = 0.0;
};

/// Great-circle distance in km on a sphere of radius 6371 km.
Km haversine_km(const Location& a, const Location& b);

/// Road distance is haversine * detour factor, driven at the average speed.
Leg travel(const Location& a, const Location& b, const TravelParams& params);
inline Leg travel(const Location& a, const Location& b, const Instance& inst) { return travel(a, b, inst.travel); }

inline Kwh energy(Km distance, const EvProfile& ev) { return ev.efficiency * distance; }

struct FareParams {
    double base = 2.75;
    double per_km = 1.49;
    double per_min = 0.39;
    double driver_share = 0.7;  // after the platform's 30% service fee
};

Money order_fare(Km distance, Minutes time, const FareParams& params = {});

/// Energy moved by one full slot at the station.
inline Kwh slot_energy(const Station& st, const Horizon& horizon) { return st.power_kw * horizon.slot_minutes / 60.0; }

/// Cost of the energy to drive from a to b, priced at the dearest charge price anywhere.
Money energy_penalty(const Location& a, const Location& b, const Instance& inst);

}  // namespace evop

#endif  // EVOP_METRIC_HPP
