#include "evop/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace evop {

using nlohmann::json;

namespace {

/// Field reader that remembers which keys were consumed so leftovers can be rejected.
class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("expected an object");
    }

    const json& at(const std::string& key) {
        auto it = j_.find(key);
        if (it == j_.end()) fail("missing key '" + key + "'");
        seen_.insert(key);
        return *it;
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    double number(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number()) fail_field(key, "expected a number");
        return v.get<double>();
    }

    int integer(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number_integer()) fail_field(key, "expected an integer");
        return v.get<int>();
    }

    std::string string(const std::string& key) {
        const json& v = at(key);
        if (!v.is_string()) fail_field(key, "expected a string");
        return v.get<std::string>();
    }

    const json& array(const std::string& key) {
        const json& v = at(key);
        if (!v.is_array()) fail_field(key, "expected an array");
        return v;
    }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) fail("unknown key '" + it.key() + "'");
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError((path_.empty() ? std::string("<root>") : path_) + ": " + msg);
    }
    [[noreturn]] void fail_field(const std::string& key, const std::string& msg) const {
        throw ParseError(child(key) + ": " + msg);
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

Location location_from_json(const json& j, const std::string& path) {
    Fields f(j, path);
    Location loc{f.number("lat"), f.number("lon")};
    f.finish();
    if (!loc.valid()) throw ParseError(path + ": latitude/longitude out of range");
    return loc;
}

std::vector<double> prices_from_json(const json& j, const std::string& path) {
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_number()) throw ParseError(path + "[" + std::to_string(k) + "]: expected a number");
        out.push_back(j[k].get<double>());
    }
    return out;
}

std::size_t line_of(const std::string& text, std::size_t byte, std::size_t& column) {
    std::size_t line = 1;
    std::size_t last_nl = 0;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            last_nl = i + 1;
        }
    }
    column = byte >= last_nl ? byte - last_nl : 0;
    return line;
}

}  // namespace

json to_json(const Location& loc) { return json{{"lat", loc.lat}, {"lon", loc.lon}}; }

json to_json(const Instance& inst) {
    json orders = json::array();
    for (const Order& o : inst.orders) {
        orders.push_back({{"id", o.id},
                          {"pickup", to_json(o.pickup)},
                          {"dropoff", to_json(o.dropoff)},
                          {"fare", o.fare},
                          {"service_distance_km", o.service_distance},
                          {"service_time_min", o.service_time},
                          {"window_start_min", o.window_start},
                          {"window_end_min", o.window_end}});
    }
    json stations = json::array();
    for (const Station& s : inst.stations) {
        stations.push_back({{"id", s.id},
                            {"location", to_json(s.location)},
                            {"power_kw", s.power_kw},
                            {"kind", to_string(s.kind)},
                            {"tariff", {{"charge_price", s.tariff.charge_price},
                                        {"discharge_price", s.tariff.discharge_price}}}});
    }
    const auto& ev = inst.query.ev;
    json j = {{"horizon", {{"slot_minutes", inst.horizon.slot_minutes}}},
              {"ev", {{"capacity_kwh", ev.capacity},
                      {"efficiency_kwh_per_km", ev.efficiency},
                      {"initial_soc_kwh", ev.initial_soc},
                      {"final_soc_min_kwh", ev.final_soc_min}}},
              {"query", {{"source", to_json(inst.query.source)},
                         {"destination", to_json(inst.query.destination)},
                         {"work_start_min", inst.query.work_start},
                         {"work_end_min", inst.query.work_end}}},
              {"orders", std::move(orders)},
              {"stations", std::move(stations)},
              {"travel", {{"avg_speed_kmh", inst.travel.avg_speed_kmh}, {"detour_factor", inst.travel.detour_factor}}}};
    if (!inst.name.empty()) j["name"] = inst.name;
    return j;
}

Instance instance_from_json(const json& j) {
    Fields root(j, "");
    Instance inst;
    if (root.has("name")) inst.name = root.string("name");

    {
        Fields h(root.at("horizon"), "horizon");
        inst.horizon.slot_minutes = h.integer("slot_minutes");
        h.finish();
        if (!inst.horizon.valid()) throw ParseError("horizon.slot_minutes: must be > 0 and divide 1440");
    }
    {
        Fields e(root.at("ev"), "ev");
        inst.query.ev.capacity = e.number("capacity_kwh");
        inst.query.ev.efficiency = e.number("efficiency_kwh_per_km");
        inst.query.ev.initial_soc = e.number("initial_soc_kwh");
        inst.query.ev.final_soc_min = e.number("final_soc_min_kwh");
        e.finish();
    }
    {
        Fields q(root.at("query"), "query");
        inst.query.source = location_from_json(q.at("source"), "query.source");
        inst.query.destination = location_from_json(q.at("destination"), "query.destination");
        inst.query.work_start = q.number("work_start_min");
        inst.query.work_end = q.number("work_end_min");
        q.finish();
    }
    {
        Fields t(root.at("travel"), "travel");
        inst.travel.avg_speed_kmh = t.number("avg_speed_kmh");
        inst.travel.detour_factor = t.number("detour_factor");
        t.finish();
    }

    const json& orders = root.array("orders");
    for (std::size_t i = 0; i < orders.size(); ++i) {
        const std::string path = "orders[" + std::to_string(i) + "]";
        Fields f(orders[i], path);
        Order o;
        o.id = f.integer("id");
        o.pickup = location_from_json(f.at("pickup"), path + ".pickup");
        o.dropoff = location_from_json(f.at("dropoff"), path + ".dropoff");
        o.fare = f.number("fare");
        o.service_distance = f.number("service_distance_km");
        o.service_time = f.number("service_time_min");
        o.window_start = f.number("window_start_min");
        o.window_end = f.number("window_end_min");
        f.finish();
        inst.orders.push_back(o);
    }

    const int slots = inst.horizon.slot_count();
    const json& stations = root.array("stations");
    for (std::size_t i = 0; i < stations.size(); ++i) {
        const std::string path = "stations[" + std::to_string(i) + "]";
        Fields f(stations[i], path);
        Station s;
        s.id = f.integer("id");
        s.location = location_from_json(f.at("location"), path + ".location");
        s.power_kw = f.number("power_kw");
        try {
            s.kind = station_kind_from_string(f.string("kind"));
        } catch (const InvalidInstance& e) {
            throw ParseError(path + ".kind: " + e.what());
        }
        Fields t(f.at("tariff"), path + ".tariff");
        s.tariff.charge_price = prices_from_json(t.array("charge_price"), path + ".tariff.charge_price");
        s.tariff.discharge_price = prices_from_json(t.array("discharge_price"), path + ".tariff.discharge_price");
        t.finish();
        f.finish();
        if (static_cast<int>(s.tariff.charge_price.size()) != slots ||
            static_cast<int>(s.tariff.discharge_price.size()) != slots)
            throw ParseError(path + " (station id " + std::to_string(s.id) + "): tariff arrays must have " +
                             std::to_string(slots) + " entries");
        inst.stations.push_back(std::move(s));
    }
    root.finish();

    try {
        inst.finalize();
    } catch (const InvalidInstance& e) {
        throw ParseError(e.what());
    }
    return inst;
}

json to_json(const Action& a) {
    switch (a.kind) {
        case ActionKind::serve: return {{"type", "serve"}, {"order", a.target}};
        case ActionKind::charge:
            return {{"type", "charge"}, {"station", a.target}, {"slot_begin", a.slot_begin}, {"slot_end", a.slot_end}};
        case ActionKind::discharge:
            return {{"type", "discharge"}, {"station", a.target}, {"slot_begin", a.slot_begin}, {"slot_end", a.slot_end}};
    }
    return {};
}

json to_json(const Schedule& s) {
    json actions = json::array();
    for (const Action& a : s.actions) actions.push_back(to_json(a));
    return json{{"actions", std::move(actions)}};
}

Schedule schedule_from_json(const json& j) {
    Fields root(j, "");
    Schedule s;
    const json& actions = root.array("actions");
    for (std::size_t i = 0; i < actions.size(); ++i) {
        const std::string path = "actions[" + std::to_string(i) + "]";
        Fields f(actions[i], path);
        const std::string type = f.string("type");
        if (type == "serve") {
            s.actions.push_back(Action::serve(f.integer("order")));
        } else if (type == "charge" || type == "discharge") {
            const int station = f.integer("station");
            const int begin = f.integer("slot_begin");
            const int end = f.integer("slot_end");
            if (begin >= end) f.fail("slot_begin must be < slot_end");
            s.actions.push_back(type == "charge" ? Action::charge(station, begin, end)
                                                 : Action::discharge(station, begin, end));
        } else {
            f.fail_field("type", "expected serve, charge or discharge");
        }
        f.finish();
    }
    root.finish();
    return s;
}

json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t col = 0;
        const std::size_t line = line_of(text, e.byte == 0 ? 0 : e.byte - 1, col);
        throw ParseError(origin + ":" + std::to_string(line) + ":" + std::to_string(col + 1) + ": " + e.what());
    }
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string() + ": cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_json_text(buf.str(), path.string());
}

std::string dump(const json& j) { return j.dump(2); }

void write_json_file(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << dump(j) << '\n';
}

Instance load_instance(const std::filesystem::path& path) {
    const json j = read_json_file(path);
    try {
        return instance_from_json(j);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void save_instance(const Instance& inst, const std::filesystem::path& path) { write_json_file(to_json(inst), path); }

Schedule load_schedule(const std::filesystem::path& path) {
    const json j = read_json_file(path);
    try {
        return schedule_from_json(j);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void save_schedule(const Schedule& s, const std::filesystem::path& path) { write_json_file(to_json(s), path); }

}  // namespace evop
