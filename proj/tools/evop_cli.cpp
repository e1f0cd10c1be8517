// evop: generate instances, run solvers, batch experiments, check schedules.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evop/experiment.hpp"
#include "evop/io.hpp"
#include "evop/simulate.hpp"

namespace fs = std::filesystem;
using namespace evop;

namespace {

constexpr int kOk = 0;
constexpr int kInfeasible = 1;
constexpr int kBadInput = 2;

struct GenOptions {
    int orders = 30;
    int stations = 3;
    double bbox = 0.40;
    std::string bucket = "10-25";
    std::string period = "8h";
    int slot = 15;

    GenParams params(std::uint64_t seed) const {
        GenParams g;
        g.seed = seed;
        g.n_orders = orders;
        g.n_stations = stations;
        g.bbox_fraction = bbox;
        g.ride_bucket = ride_bucket_from_string(bucket);
        g.period = period_from_string(period);
        g.slot_minutes = slot;
        g.validate();
        return g;
    }
};

void add_gen_options(CLI::App* app, GenOptions& o) {
    app->add_option("--orders", o.orders, "number of orders")->capture_default_str();
    app->add_option("--stations", o.stations, "number of grid stations")->capture_default_str();
    app->add_option("--bbox", o.bbox, "fraction of the region's area")->capture_default_str();
    app->add_option("--bucket,--ride-bucket", o.bucket, "ride distance bucket: 5-10, 10-25 or 25+")->capture_default_str();
    app->add_option("--period", o.period, "order time frame: 2h, 5h or 8h")->capture_default_str();
    app->add_option("--slot", o.slot, "slot length in minutes")->capture_default_str();
}

void write_or_print(const nlohmann::json& j, const fs::path& path) {
    if (path.empty()) {
        std::cout << dump(j) << '\n';
        return;
    }
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_json_file(j, path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EV orienteering with vehicle-to-grid: generator, solvers and benchmark harness"};
    app.require_subcommand(1);
    app.fallthrough();
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out_dir;
    app.add_option("--seed", seed, "random seed (runs use seed + repeat)")->capture_default_str();
    app.add_option("--workers", workers, "parallel runs in bench")->capture_default_str();
    app.add_option("--out-dir", out_dir, "output directory");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic instance");
    GenOptions gen_opts;
    std::string gen_out;
    add_gen_options(gen, gen_opts);
    gen->add_option("-o,--output,--out", gen_out, "instance file (default: stdout, or <out-dir>/<name>.json)");

    // solve
    auto* solve = app.add_subcommand("solve", "run one solver on one instance");
    std::string instance_path, algo = "lns";
    double time_limit = 60.0;
    SolverSettings settings;
    solve->add_option("--instance", instance_path, "instance JSON")->required();
    solve->add_option("--algo", algo, "bl, ea, lns or exact")->capture_default_str();
    solve->add_option("--time-limit", time_limit, "seconds")->capture_default_str();
    solve->add_option("--theta", settings.lns.theta, "LNS battery threshold fraction")->capture_default_str();
    solve->add_option("--regret-k", settings.lns.regret_k, "LNS regret horizon")->capture_default_str();
    solve->add_option("--rank-power", settings.lns.rank_power, "rank randomization exponent")->capture_default_str();
    solve->add_option("--alpha", settings.lns.alpha, "ALNS reaction factor")->capture_default_str();
    solve->add_option("--pop", settings.ea.population, "EA population size")->capture_default_str();
    solve->add_option("--tournament", settings.ea.tournament, "EA tournament size")->capture_default_str();
    solve->add_option("--mutation-prob", settings.ea.mutation_prob, "EA mutation probability")->capture_default_str();
    solve->add_option("--revisits", settings.exact.revisits, "exact: extra visits per station")->capture_default_str();
    std::string solve_out;
    solve->add_option("-o,--output,--out", solve_out, "report file (default: stdout, or <out-dir>/<name>_<algo>.json)");
    bool serial = false;
    solve->add_flag("--serial", serial, "EA: run the serial reference path");

    // bench
    auto* bench = app.add_subcommand("bench", "batch experiment over instances, algorithms and repeats");
    std::vector<std::string> bench_instances;
    int generate_count = 0;
    GenOptions bench_gen;
    ExperimentConfig cfg;
    bench->add_option("--instances", bench_instances, "instance JSON files");
    bench->add_option("--generate", generate_count, "also generate this many instances (seeds seed, seed+1, ...)");
    add_gen_options(bench, bench_gen);
    bench->add_option("--algos", cfg.algos, "algorithms")->capture_default_str();
    bench->add_option("--repeats", cfg.repeats, "runs per instance and algorithm")->capture_default_str();
    bench->add_option("--time-limit-small", cfg.time_limit_small, "seconds")->capture_default_str();
    bench->add_option("--time-limit-large", cfg.time_limit_large, "seconds")->capture_default_str();
    bench->add_option("--large-from", cfg.large_from_orders, "order count that selects the large budget")
        ->capture_default_str();
    bench->add_option("--price-factors", cfg.price_factors, "price and power scaling factors")->capture_default_str();
    bench->add_option("--fare-factors", cfg.fare_factors, "fare scaling factors")->capture_default_str();

    // verify
    auto* verify = app.add_subcommand("verify", "check a schedule against an instance");
    std::string verify_instance, verify_schedule;
    verify->add_option("--instance", verify_instance, "instance JSON")->required();
    verify->add_option("--schedule", verify_schedule, "schedule or solver report JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kBadInput;
    }

    try {
        if (*gen) {
            const Instance inst = generate(gen_opts.params(seed));
            fs::path path = gen_out;
            if (path.empty() && !out_dir.empty()) {
                fs::create_directories(out_dir);
                path = fs::path(out_dir) / (inst.name + ".json");
            }
            write_or_print(to_json(inst), path);
            if (!path.empty()) std::cerr << "wrote " << path.string() << '\n';
            return kOk;
        }

        if (*solve) {
            const Instance inst = load_instance(instance_path);
            settings.ea.parallel = !serial;
            const SolverReport rep = run_solver(algo, inst, seed, time_limit, settings);
            fs::path path = solve_out;
            if (!out_dir.empty()) {
                fs::create_directories(out_dir);
                if (path.empty()) path = fs::path(out_dir) / (inst.name + "_" + algo + ".json");
                std::ofstream(fs::path(out_dir) / (inst.name + "_" + algo + "_convergence.csv")) << emit_convergence(rep);
            }
            write_or_print(to_json(rep), path);
            std::fprintf(stderr, "%s: profit %.4f (orders %.4f, v2g %.4f) in %.2f s\n", algo.c_str(), rep.total_profit,
                         rep.order_profit, rep.v2g_profit, rep.wall_clock_s);
            return rep.feasible ? kOk : kInfeasible;
        }

        if (*bench) {
            for (const auto& p : bench_instances) cfg.instance_paths.emplace_back(p);
            for (int i = 0; i < generate_count; ++i)
                cfg.generated.push_back(bench_gen.params(seed + static_cast<std::uint64_t>(i)));
            cfg.seed_base = seed;
            cfg.workers = workers;
            cfg.out_dir = out_dir.empty() ? fs::path("results") : fs::path(out_dir);
            const ExperimentResult res = run_experiment(cfg);
            std::cout << summary_csv(res.groups);
            int failures = 0;
            for (const auto& r : res.runs) failures += !r.error.empty();
            std::cerr << res.runs.size() << " runs, " << failures << " failed; results in " << cfg.out_dir.string() << '\n';
            return kOk;
        }

        if (*verify) {
            const Instance inst = load_instance(verify_instance);
            const nlohmann::json j = read_json_file(verify_schedule);
            const Schedule s = j.is_object() && j.contains("algo") ? report_from_json(j).schedule : schedule_from_json(j);
            const SimResult r = simulate(s, inst);
            if (!r.feasible()) {
                std::cout << "infeasible: " << r.error->describe() << '\n';
                return kInfeasible;
            }
            const ProfitBreakdown b = profit_breakdown(s, inst);
            std::printf("feasible: profit %.6f (orders %.6f, v2g %.6f)\n", b.total(), b.orders, b.v2g);
            return kOk;
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const InvalidInstance& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInfeasible;
    }
    return kOk;
}
