#ifndef EVOP_CONSTRUCT_HPP
#define EVOP_CONSTRUCT_HPP

#include <optional>
#include <utility>
#include <vector>

#include "evop/model.hpp"
#include "evop/rng.hpp"
#include "evop/simulate.hpp"

namespace evop {

/// Forward trace plus backward slack of a feasible schedule. Gap p is the
/// position just before action p; gap size() is the leg to the destination.
struct Timeline {
    Trace trace;
    std::vector<Minutes> latest;  // latest arrival at the entry of action p (or the destination)
    std::vector<Kwh> spare;       // energy that may still be spent before action p
    std::vector<Kwh> headroom;    // energy that may still be gained before action p

    static std::optional<Timeline> build(const Schedule& s, const Instance& inst);

    std::size_t gaps() const { return latest.size(); }
    Minutes leave_time(std::size_t p) const { return p == 0 ? 0.0 : trace.steps[p - 1].depart; }
    Kwh leave_battery(std::size_t p, const Instance& inst) const {
        return p == 0 ? inst.query.ev.initial_soc : trace.steps[p - 1].battery_out;
    }
    /// Battery on reaching the entry of action p (or the destination).
    Kwh entry_battery(std::size_t p) const {
        return p < trace.steps.size() ? trace.steps[p].battery_in : trace.terminal_battery;
    }
};

const Location& leave_location(const Schedule& s, const Instance& inst, std::size_t p);
const Location& entry_location_at(const Schedule& s, const Instance& inst, std::size_t p);

/// Effect of putting one extra action into gap p, checked in O(1) against the slack.
struct InsertCheck {
    bool feasible = false;
    Minutes depart = 0.0;
    Kwh battery_after = 0.0;
    Money money = 0.0;
};
InsertCheck check_insert(const Schedule& s, const Timeline& tl, const Instance& inst, std::size_t p, const Action& a);

/// Whether a grid or home station may operate during slot k.
bool slot_usable(const Instance& inst, const Station& st, int k);

/// Slot range [first, last) a station can use inside gap p, or nullopt.
struct SlotWindow {
    int first = 0;
    int last = 0;
};
std::optional<SlotWindow> station_window(const Schedule& s, const Timeline& tl, const Instance& inst, std::size_t p,
                                         int station);

/// Energy-weighted selling minus buying prices over the window, less the
/// energy penalties of the detour through the station.
Money station_score(const Schedule& s, const Instance& inst, std::size_t p, int station, const SlotWindow& w);

/// Slot counts [lo, hi] for a charge or discharge at `station` in gap p that keep
/// the battery within limits here and downstream; nullopt when none fit.
std::optional<std::pair<int, int>> slot_count_range(const Schedule& s, const Timeline& tl, const Instance& inst,
                                                    std::size_t p, int station, const SlotWindow& w, bool charging);

/// Random charge or discharge in gap p at one of the five best scored stations.
/// Returns the grown schedule, or nullopt when the draw was not feasible.
std::optional<Schedule> random_cd_insert(const Schedule& s, const Timeline& tl, const Instance& inst, std::size_t p,
                                         Rng& rng);

/// Orders in the schedule, and a served flag per order id.
std::vector<char> served_mask(const Schedule& s, const Instance& inst);

/// Energy still needed after leaving `from` to reach the destination with B^d.
Kwh reserve_from(const Location& from, const Instance& inst);

}  // namespace evop

#endif  // EVOP_CONSTRUCT_HPP
