// Command line front end: `sim run`, `sim bench`, `sim scenario`.
//
// Exit codes: 0 success, 2 invalid input, 1 any other failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crowdsim/crowdsim.hpp"

namespace {

using namespace crowdsim;

constexpr const char* kBuiltinPrefix = "builtin:";

Scenario resolve_scenario(const std::string& spec, std::optional<std::size_t> n, std::optional<double> width,
                          std::uint64_t seed) {
    if (spec.rfind(kBuiltinPrefix, 0) == 0) {
        Scenario s = builtin_scenario(spec.substr(std::char_traits<char>::length(kBuiltinPrefix)), n, width, seed);
        s.validate();
        return s;
    }
    try {
        return load_scenario_file(spec);
    } catch (const IoError& e) {
        throw ValidationError(e.what());
    }
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vision-cone collision-avoidance crowd simulator"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Simulate a scenario and write trajectory/metrics/manifest");
    std::string scenario_spec;
    std::string solver_name_arg = "hybrid";
    int p = 2;
    double rc = 4.0;
    double dt = 0.0078125;
    std::optional<double> duration;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    std::size_t stride = 1;
    std::optional<std::size_t> n_particles;
    std::optional<double> width;
    run->add_option("--scenario", scenario_spec, "JSON file or builtin:NAME")->required();
    run->add_option("--solver", solver_name_arg, "original|rbm|short|hybrid");
    run->add_option("--p", p, "batch size (rbm, hybrid)");
    run->add_option("--rc", rc, "cell width in m (short, hybrid)");
    run->add_option("--dt", dt, "time step in s");
    run->add_option("--duration", duration, "simulated time in s (default: scenario)");
    run->add_option("--seed", seed, "random seed (batches and ConfinedSquare placement)");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--stride", stride, "output every k steps");
    run->add_option("--n", n_particles, "particle count for builtin:ConfinedSquare");
    run->add_option("--width", width, "box width D in m for builtin:ConfinedSquare");

    // bench
    auto* bench = app.add_subcommand("bench", "Time solvers on ConfinedSquare at constant density");
    std::string sizes_arg = "32,128,512,2048";
    std::string solvers_arg = "hybrid,original";
    BenchConfig bcfg;
    std::string bench_out = "bench";
    bench->add_option("--sizes", sizes_arg, "comma separated particle counts");
    bench->add_option("--solvers", solvers_arg, "comma separated solver names");
    bench->add_option("--p", p, "batch size (rbm, hybrid)");
    bench->add_option("--rc", rc, "cell width in m (short, hybrid)");
    bench->add_option("--dt", bcfg.dt, "time step in s");
    bench->add_option("--duration", bcfg.duration, "simulated time in s");
    bench->add_option("--seed", bcfg.seed, "random seed");
    bench->add_option("--jobs", bcfg.jobs, "concurrent runs");
    bench->add_option("--out", bench_out, "output directory");

    // scenario
    auto* show = app.add_subcommand("scenario", "Write a built-in scenario as JSON");
    std::string show_name;
    std::string show_out;
    show->add_option("--name", show_name, "Circle|Obstacles|Crossing|GroupSwap|ConfinedSquare")->required();
    show->add_option("--n", n_particles, "particle count for ConfinedSquare");
    show->add_option("--width", width, "box width D in m for ConfinedSquare");
    show->add_option("--seed", seed, "placement seed for ConfinedSquare");
    show->add_option("--out", show_out, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*run) {
            const Scenario sc = resolve_scenario(scenario_spec, n_particles, width, seed);
            RunConfig cfg;
            cfg.solver = make_solver(solver_name_arg, p, rc);
            cfg.dt = dt;
            cfg.duration = duration;
            cfg.seed = seed;
            cfg.stride = stride;
            if (!(dt > 0.0)) throw ValidationError("--dt must be > 0");
            const MetricsSeries series = write_outputs(sc, cfg, out_dir);
            const auto& last = series.rows.back();
            std::printf("%s: %zu particles, %zu rows, t=%s, collisions energy loss %s J -> %s\n",
                        sc.name.c_str(), sc.particles.size(), series.rows.size(), fmt9(last.t).c_str(),
                        fmt9(last.energy_loss_cum).c_str(), out_dir.c_str());
        } else if (*bench) {
            bcfg.sizes.clear();
            for (const auto& s : split_csv(sizes_arg)) bcfg.sizes.push_back(std::stoul(s));
            bcfg.solvers.clear();
            for (const auto& s : split_csv(solvers_arg)) bcfg.solvers.push_back(make_solver(s, p, rc));
            if (bcfg.sizes.empty() || bcfg.solvers.empty()) throw ValidationError("bench needs sizes and solvers");
            const BenchReport report = run_bench(bcfg);
            std::filesystem::create_directories(bench_out);
            std::ofstream timings(std::filesystem::path(bench_out) / "bench.csv");
            std::ofstream slopes(std::filesystem::path(bench_out) / "bench_slopes.csv");
            if (!timings || !slopes) throw IoError("cannot write into " + bench_out);
            write_bench_csv(report, timings, slopes);
            write_bench_csv(report, std::cout, std::cout);
        } else if (*show) {
            Scenario sc = builtin_scenario(show_name, n_particles, width, seed);
            const std::string text = scenario_to_json(sc).dump(2) + "\n";
            if (show_out.empty()) {
                std::cout << text;
            } else {
                write_text(show_out, text);
            }
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
