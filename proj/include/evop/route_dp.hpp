#ifndef EVOP_ROUTE_DP_HPP
#define EVOP_ROUTE_DP_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "evop/model.hpp"

namespace evop {

class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RouteInfeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Visit {
    enum class Kind { order, station };
    Kind kind = Kind::order;
    int id = 0;

    static Visit order(int id) { return {Kind::order, id}; }
    static Visit station(int id) { return {Kind::station, id}; }
    friend bool operator==(const Visit&, const Visit&) = default;
};

/// Fixed visiting order. Orders are mandatory; every station entry may be
/// skipped or used for one contiguous charge or discharge interval.
struct RouteSkeleton {
    std::vector<Visit> visits;
    int revisits = 2;

    /// One entry per action of `s`, in order.
    static RouteSkeleton from_schedule(const Schedule& s, int revisits = 2);

    /// Throws std::invalid_argument on unknown ids, repeated orders or too many station entries.
    void validate(const Instance& inst) const;
};

struct DpConfig {
    double battery_resolution = 0.05;  // kWh
    double suboptimality_gap = 0.0;
    std::size_t max_states = 50'000'000;

    void validate() const;
};

struct RouteResult {
    Schedule schedule;
    Money profit = 0.0;
    Money resolution_bound = 0.0;
};

/// Worst-case profit lost to merging battery levels that share a grid cell.
Money resolution_bound(const Instance& inst, double resolution, int station_visits);

/// Best schedule along the skeleton. A warm start, when given, must follow the
/// skeleton; it seeds the pruning bound and is returned if nothing beats it.
/// Throws RouteInfeasible or CapExceeded.
RouteResult optimize_route_schedule(const Instance& inst, const RouteSkeleton& skel, const DpConfig& cfg = {},
                                    const Schedule* warm_start = nullptr);

/// Label-setting engine behind optimize_route_schedule and the exact search.
/// A frontier is a set of non-dominated labels after some prefix of visits.
class ScheduleDp {
public:
    struct Label {
        Minutes time = 0.0;
        Kwh battery = 0.0;
        Money money = 0.0;
        int loc = -1;      // -1 source, order id, or order count + station id
        int parent = -1;
        Action action;
        bool has_action = false;
    };
    using Frontier = std::vector<int>;
    using Filter = std::function<bool(const Label&)>;

    ScheduleDp(const Instance& inst, const DpConfig& cfg);

    Frontier start();
    Frontier serve(const Frontier& in, int order_id);
    /// With allow_skip the incoming labels also pass through untouched.
    Frontier visit_station(const Frontier& in, int station_id, bool allow_skip);

    struct Finish {
        int label = -1;
        Money money = 0.0;
    };
    /// Best label that can still drive to the destination in time with B^d left.
    std::optional<Finish> finish(const Frontier& in) const;
    Schedule reconstruct(int label) const;

    const Label& label(int id) const { return labels_[id]; }
    std::size_t size() const { return labels_.size(); }
    std::size_t created() const { return created_; }
    /// Drops labels created after `mark`; used when backtracking.
    void truncate(std::size_t mark) { labels_.resize(mark); }
    /// Labels rejected by the filter are never stored.
    void set_filter(Filter f) { filter_ = std::move(f); }

private:
    int bucket(Kwh battery) const;
    const Location& where(int loc) const;
    int push(const Label& l);

    struct Builder {
        std::unordered_map<long long, std::vector<int>> groups;
    };
    void offer(Builder& b, const Label& l, int existing = -1);
    static Frontier collect(const Builder& b);

    const Instance& inst_;
    DpConfig cfg_;
    std::vector<Label> labels_;
    std::size_t created_ = 0;
    int buckets_ = 1;
    Filter filter_;
};

}  // namespace evop

#endif  // EVOP_ROUTE_DP_HPP
