#ifndef EVOP_INSTANCE_GEN_HPP
#define EVOP_INSTANCE_GEN_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include "evop/metric.hpp"
#include "evop/model.hpp"

namespace evop {

class InvalidParams : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class RideBucket { short_5_10, medium_10_25, long_25_plus };
enum class Period { two_hours, five_hours, eight_hours };

RideBucket ride_bucket_from_string(const std::string& s);  // "5-10", "10-25", "25+"
Period period_from_string(const std::string& s);           // "2h", "5h", "8h"
std::string to_string(RideBucket b);
std::string to_string(Period p);

/// Ride distance range in km. Trips above 25 km are capped at 40 km.
std::pair<double, double> bucket_range(RideBucket b);
/// Order time frame in minutes of day, all starting at 9 am.
std::pair<double, double> period_range(Period p);

struct BoundingBox {
    double lat_min = -38.10;
    double lat_max = -37.60;
    double lon_min = 144.70;
    double lon_max = 145.30;

    /// Concentric box covering `fraction` of this box's area.
    BoundingBox scaled(double fraction) const;
};

/// Time-of-use (buying) and feed-in (selling) price templates, per kWh.
struct TariffTemplate {
    double tou_peak = 0.412;     // 3 pm - 9 pm
    double tou_offpeak = 0.2665;
    double fit_peak = 0.117;     // 4 pm - 9 pm
    double fit_shoulder = 0.061; // 9 pm - 10 am and 2 pm - 4 pm
    double fit_offpeak = 0.043;  // 10 am - 2 pm

    double charge_at(double minute_of_day) const;
    double discharge_at(double minute_of_day) const;
};

struct GenParams {
    std::uint64_t seed = 1;
    int n_orders = 30;
    int n_stations = 3;
    double bbox_fraction = 0.40;
    RideBucket ride_bucket = RideBucket::medium_10_25;
    Period period = Period::eight_hours;
    BoundingBox region;
    FareParams fare;
    TariffTemplate tariff;

    int slot_minutes = 15;
    EvProfile ev;
    double work_start = 540.0;
    double work_end = 1020.0;
    TravelParams travel;
    double home_power_kw = 7.0;
    double station_price_jitter = 0.10;

    void validate() const;
};

/// Synthetic instance: stations 0/1 are the home source/destination, the rest are grid stations.
Instance generate(const GenParams& params);

/// New instance with every price, station power and order fare multiplied by the given factors.
Instance scale_prices(const Instance& inst, double price_factor, double power_factor, double fare_factor);

}  // namespace evop

#endif  // EVOP_INSTANCE_GEN_HPP
