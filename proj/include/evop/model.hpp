#ifndef EVOP_MODEL_HPP
#define EVOP_MODEL_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace evop {

using Minutes = double;
using Kwh = double;
using Km = double;
using Money = double;

inline constexpr double kMoneyTol = 1e-6;
inline constexpr double kBatteryTol = 1e-6;
inline constexpr int kMinutesPerDay = 1440;

struct Location {
    double lat = 0.0;
    double lon = 0.0;

    bool valid() const { return lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0; }
    friend bool operator==(const Location&, const Location&) = default;
};

/// One 24 hour day cut into equal slots; slot k covers [k*slot_minutes, (k+1)*slot_minutes).
struct Horizon {
    int slot_minutes = 15;

    int slot_count() const { return kMinutesPerDay / slot_minutes; }
    Minutes slot_start(int k) const { return static_cast<Minutes>(k) * slot_minutes; }
    bool valid() const { return slot_minutes > 0 && kMinutesPerDay % slot_minutes == 0; }
    friend bool operator==(const Horizon&, const Horizon&) = default;
};

struct Order {
    int id = 0;
    Location pickup;
    Location dropoff;
    Money fare = 0.0;
    Km service_distance = 0.0;
    Minutes service_time = 0.0;
    Minutes window_start = 0.0;
    Minutes window_end = 0.0;

    friend bool operator==(const Order&, const Order&) = default;
};

/// Piece-wise constant prices, one entry per horizon slot, in money per kWh.
struct Tariff {
    std::vector<double> charge_price;
    std::vector<double> discharge_price;

    friend bool operator==(const Tariff&, const Tariff&) = default;
};

enum class StationKind { grid_station, home_source, home_destination };

std::string to_string(StationKind kind);
StationKind station_kind_from_string(const std::string& s);

struct Station {
    int id = 0;
    Location location;
    double power_kw = 7.0;
    Tariff tariff;
    StationKind kind = StationKind::grid_station;

    /// Home stations may operate outside working hours.
    bool is_home() const { return kind != StationKind::grid_station; }
    friend bool operator==(const Station&, const Station&) = default;
};

struct EvProfile {
    Kwh capacity = 70.0;
    double efficiency = 0.175;  // kWh per km
    Kwh initial_soc = 70.0;
    Kwh final_soc_min = 0.0;

    friend bool operator==(const EvProfile&, const EvProfile&) = default;
};

struct Query {
    Location source;
    Location destination;
    Minutes work_start = 540.0;
    Minutes work_end = 1020.0;
    EvProfile ev;

    friend bool operator==(const Query&, const Query&) = default;
};

struct TravelParams {
    double avg_speed_kmh = 40.0;
    double detour_factor = 1.3;

    friend bool operator==(const TravelParams&, const TravelParams&) = default;
};

class InvalidInstance : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Problem description. Order and station ids equal their position in the
/// vectors. Call `finalize()` after building or editing one by hand; it
/// validates the invariants and refreshes the cached price extrema.
struct Instance {
    std::string name;
    Horizon horizon;
    std::vector<Order> orders;
    std::vector<Station> stations;
    Query query;
    TravelParams travel;

    void finalize();

    double max_charge_price() const { return max_charge_price_; }
    double max_discharge_price() const { return max_discharge_price_; }
    int home_source() const { return home_source_; }
    int home_destination() const { return home_destination_; }

    bool operator==(const Instance& other) const;

private:
    double max_charge_price_ = 0.0;
    double max_discharge_price_ = 0.0;
    int home_source_ = -1;
    int home_destination_ = -1;
};

enum class ActionKind { serve, charge, discharge };

/// One plan element. `target` is an order id for serve and a station id
/// otherwise; slots are [slot_begin, slot_end) and unused for serve.
struct Action {
    ActionKind kind = ActionKind::serve;
    int target = 0;
    int slot_begin = 0;
    int slot_end = 0;

    static Action serve(int order_id) { return {ActionKind::serve, order_id, 0, 0}; }
    static Action charge(int station_id, int begin, int end) { return {ActionKind::charge, station_id, begin, end}; }
    static Action discharge(int station_id, int begin, int end) { return {ActionKind::discharge, station_id, begin, end}; }

    bool is_serve() const { return kind == ActionKind::serve; }
    bool is_energy() const { return kind != ActionKind::serve; }
    int slots() const { return slot_end - slot_begin; }
    friend bool operator==(const Action&, const Action&) = default;
};

/// Actions between the implicit departure from the source and arrival at the destination.
struct Schedule {
    std::vector<Action> actions;

    std::size_t size() const { return actions.size(); }
    bool empty() const { return actions.empty(); }
    friend bool operator==(const Schedule&, const Schedule&) = default;
};

/// Location the EV reaches when starting action `a`.
const Location& entry_location(const Instance& inst, const Action& a);
/// Location the EV leaves from after finishing action `a`.
const Location& exit_location(const Instance& inst, const Action& a);

}  // namespace evop

#endif  // EVOP_MODEL_HPP
