#include "evop/report.hpp"

#include "evop/io.hpp"
#include "evop/simulate.hpp"

namespace evop {

using nlohmann::json;

void set_schedule(SolverReport& r, const Instance& inst, const Schedule& s) {
    r.schedule = s;
    const SimResult sim = simulate(s, inst);
    r.feasible = sim.feasible();
    r.order_profit = 0.0;
    r.v2g_profit = 0.0;
    r.total_profit = 0.0;
    if (!r.feasible) return;
    for (std::size_t i = 0; i < s.size(); ++i)
        (s.actions[i].is_serve() ? r.order_profit : r.v2g_profit) += sim.trace.steps[i].money_delta;
    r.total_profit = sim.trace.total_money();
}

json to_json(const SolverReport& r) {
    json conv = json::array();
    for (const auto& p : r.convergence) conv.push_back({p.elapsed_s, p.profit});
    json j = {{"algo", r.algo},
              {"seed", r.seed},
              {"instance", r.instance},
              {"schedule", to_json(r.schedule)},
              {"total_profit", r.total_profit},
              {"order_profit", r.order_profit},
              {"v2g_profit", r.v2g_profit},
              {"convergence", std::move(conv)},
              {"wall_clock_s", r.wall_clock_s},
              {"feasible", r.feasible},
              {"iterations", r.iterations}};
    j["dp_bound"] = r.dp_bound ? json(*r.dp_bound) : json(nullptr);
    return j;
}

SolverReport report_from_json(const json& j) {
    SolverReport r;
    try {
        r.algo = j.at("algo").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.instance = j.at("instance").get<std::string>();
        r.schedule = schedule_from_json(j.at("schedule"));
        r.total_profit = j.at("total_profit").get<double>();
        r.order_profit = j.at("order_profit").get<double>();
        r.v2g_profit = j.at("v2g_profit").get<double>();
        for (const auto& p : j.at("convergence")) r.convergence.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        r.wall_clock_s = j.at("wall_clock_s").get<double>();
        r.feasible = j.at("feasible").get<bool>();
        r.iterations = j.value("iterations", std::uint64_t{0});
        if (j.contains("dp_bound") && !j["dp_bound"].is_null()) r.dp_bound = j["dp_bound"].get<double>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("report: ") + e.what());
    }
    return r;
}

}  // namespace evop
