#include "evop/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "evop/baseline.hpp"
#include "evop/io.hpp"

namespace evop {

SolverReport run_solver(const std::string& algo, const Instance& inst, std::uint64_t seed, double time_limit,
                        const SolverSettings& settings) {
    if (algo == "bl") {
        BaselineParams p;
        p.seed = seed;
        p.max_restarts = settings.baseline_restarts;
        return solve_baseline(inst, p);
    }
    if (algo == "ea") {
        EaParams p = settings.ea;
        p.seed = seed;
        p.time_limit = time_limit;
        return run_ea(inst, p);
    }
    if (algo == "lns") {
        LnsParams p = settings.lns;
        p.seed = seed;
        p.time_limit = time_limit;
        return run_lns(inst, p);
    }
    if (algo == "exact") {
        SolverReport r = solve_exact(inst, settings.exact);
        r.seed = seed;
        return r;
    }
    throw std::invalid_argument("unknown algorithm '" + algo + "' (expected bl, ea, lns or exact)");
}

void ExperimentConfig::validate() const {
    if (repeats < 1) throw std::invalid_argument("experiment: repeats must be >= 1");
    if (workers < 1) throw std::invalid_argument("experiment: workers must be >= 1");
    if (algos.empty()) throw std::invalid_argument("experiment: no algorithms");
    if (instance_paths.empty() && generated.empty()) throw std::invalid_argument("experiment: no instances");
    if (price_factors.empty() || fare_factors.empty()) throw std::invalid_argument("experiment: empty sweep");
    for (double f : price_factors)
        if (!(f > 0.0)) throw std::invalid_argument("experiment: price factors must be positive");
    for (double f : fare_factors)
        if (!(f > 0.0)) throw std::invalid_argument("experiment: fare factors must be positive");
    if (!(time_limit_small >= 0.0 && time_limit_large >= 0.0))
        throw std::invalid_argument("experiment: time limits must be >= 0");
    for (const auto& a : algos)
        if (a != "bl" && a != "ea" && a != "lns" && a != "exact")
            throw std::invalid_argument("experiment: unknown algorithm '" + a + "'");
}

Quartiles quartiles(std::vector<double> xs) {
    if (xs.empty()) return {};
    std::sort(xs.begin(), xs.end());
    auto at = [&](double q) {
        const double pos = q * (xs.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, xs.size() - 1);
        return xs[lo] + (pos - lo) * (xs[hi] - xs[lo]);
    };
    return {at(0.25), at(0.5), at(0.75)};
}

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string factor_tag(double f) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", f);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

struct Job {
    std::size_t instance;
    double price_factor;
    double fare_factor;
    std::string algo;
    int repeat;
};

}  // namespace

std::string emit_convergence(const SolverReport& r) {
    auto pts = r.convergence;
    std::stable_sort(pts.begin(), pts.end(),
                     [](const ConvergencePoint& a, const ConvergencePoint& b) { return a.elapsed_s < b.elapsed_s; });
    std::string out = "elapsed_s,profit\n";
    for (const auto& p : pts) out += num(p.elapsed_s) + "," + num(p.profit) + "\n";
    return out;
}

std::vector<ConvergencePoint> parse_convergence(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != "elapsed_s,profit") throw ParseError("convergence: missing header");
    std::vector<ConvergencePoint> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        try {
            if (comma == std::string::npos) throw std::invalid_argument("no comma");
            std::size_t used = 0;
            ConvergencePoint p;
            const std::string head = line.substr(0, comma);
            p.elapsed_s = std::stod(head, &used);
            if (used != head.size()) throw std::invalid_argument("trailing text");
            const std::string rest = line.substr(comma + 1);
            p.profit = std::stod(rest, &used);
            if (used != rest.size()) throw std::invalid_argument("trailing text");
            out.push_back(p);
        } catch (const std::exception&) {
            throw ParseError("convergence: bad row at line " + std::to_string(lineno));
        }
    }
    return out;
}

std::string runs_csv(const std::vector<RunRecord>& runs) {
    std::string out =
        "instance,algo,repeat,seed,price_factor,fare_factor,time_limit,total_profit,order_profit,v2g_profit,"
        "wall_clock_s,feasible,error\n";
    for (const auto& r : runs) {
        out += csv_field(r.instance) + "," + r.algo + "," + std::to_string(r.repeat) + "," + std::to_string(r.seed) + "," +
               num(r.price_factor) + "," + num(r.fare_factor) + "," + num(r.time_limit) + "," + num(r.total_profit) +
               "," + num(r.order_profit) + "," + num(r.v2g_profit) + "," + num(r.wall_clock_s) + "," +
               (r.feasible ? "1" : "0") + "," + csv_field(r.error) + "\n";
    }
    return out;
}

std::string summary_csv(const std::vector<GroupSummary>& groups) {
    std::string out =
        "algo,price_factor,fare_factor,runs,failures,total_q1,total_median,total_q3,v2g_share_q1,v2g_share_median,"
        "v2g_share_q3\n";
    for (const auto& g : groups) {
        out += g.algo + "," + num(g.price_factor) + "," + num(g.fare_factor) + "," + std::to_string(g.runs) + "," +
               std::to_string(g.failures) + "," + num(g.total.q1) + "," + num(g.total.median) + "," + num(g.total.q3) +
               "," + num(g.v2g_share.q1) + "," + num(g.v2g_share.median) + "," + num(g.v2g_share.q3) + "\n";
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<Instance> instances;
    for (const auto& path : cfg.instance_paths) instances.push_back(load_instance(path));
    for (const auto& g : cfg.generated) instances.push_back(generate(g));

    std::vector<Job> jobs;
    for (std::size_t i = 0; i < instances.size(); ++i)
        for (double pf : cfg.price_factors)
            for (double ff : cfg.fare_factors)
                for (const auto& algo : cfg.algos)
                    for (int r = 0; r < cfg.repeats; ++r) jobs.push_back({i, pf, ff, algo, r});

    // Scaled copies are built up front so workers only read shared data.
    std::map<std::tuple<std::size_t, double, double>, Instance> scaled;
    for (std::size_t i = 0; i < instances.size(); ++i)
        for (double pf : cfg.price_factors)
            for (double ff : cfg.fare_factors) {
                Instance s = (pf == 1.0 && ff == 1.0) ? instances[i] : scale_prices(instances[i], pf, pf, ff);
                if (pf != 1.0 || ff != 1.0) s.name += "-p" + factor_tag(pf) + "-f" + factor_tag(ff);
                scaled.emplace(std::tuple{i, pf, ff}, std::move(s));
            }

    std::filesystem::create_directories(cfg.out_dir / "reports");
    std::filesystem::create_directories(cfg.out_dir / "convergence");

    std::vector<RunRecord> runs(jobs.size());
    const long n = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.workers)
    for (long j = 0; j < n; ++j) {
        const Job& job = jobs[j];
        const Instance& inst = scaled.at(std::tuple{job.instance, job.price_factor, job.fare_factor});
        RunRecord& rec = runs[j];
        rec.instance = inst.name;
        rec.algo = job.algo;
        rec.repeat = job.repeat;
        rec.seed = cfg.seed_base + static_cast<std::uint64_t>(job.repeat);
        rec.price_factor = job.price_factor;
        rec.fare_factor = job.fare_factor;
        rec.time_limit = static_cast<int>(inst.orders.size()) >= cfg.large_from_orders ? cfg.time_limit_large
                                                                                          : cfg.time_limit_small;
        try {
            const SolverReport rep = run_solver(job.algo, inst, rec.seed, rec.time_limit, cfg.settings);
            rec.total_profit = rep.total_profit;
            rec.order_profit = rep.order_profit;
            rec.v2g_profit = rep.v2g_profit;
            rec.wall_clock_s = rep.wall_clock_s;
            rec.feasible = rep.feasible;
            const std::string stem = inst.name + "_" + job.algo + "_r" + std::to_string(job.repeat);
            write_json_file(to_json(rep), cfg.out_dir / "reports" / (stem + ".json"));
            if (!rep.convergence.empty()) write_text(cfg.out_dir / "convergence" / (stem + ".csv"), emit_convergence(rep));
        } catch (const std::exception& e) {
            rec.error = e.what();
            rec.feasible = false;
        }
    }

    ExperimentResult out;
    out.runs = runs;
    for (double pf : cfg.price_factors)
        for (double ff : cfg.fare_factors)
            for (const auto& algo : cfg.algos) {
                GroupSummary g;
                g.algo = algo;
                g.price_factor = pf;
                g.fare_factor = ff;
                std::vector<double> totals, shares;
                for (const auto& r : runs) {
                    if (r.algo != algo || r.price_factor != pf || r.fare_factor != ff) continue;
                    ++g.runs;
                    if (!r.error.empty()) {
                        ++g.failures;
                        continue;
                    }
                    totals.push_back(r.total_profit);
                    if (r.total_profit > 0.0) shares.push_back(r.v2g_profit / r.total_profit);
                }
                g.total = quartiles(totals);
                g.v2g_share = quartiles(shares);
                out.groups.push_back(g);
            }
    write_text(cfg.out_dir / "runs.csv", runs_csv(out.runs));
    write_text(cfg.out_dir / "summary.csv", summary_csv(out.groups));
    return out;
}

}  // namespace evop
