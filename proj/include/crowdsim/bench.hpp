#pragma once
/**
 * @file bench.hpp
 * @brief Wall-clock scaling of the solvers on the confined-square workload.
 *
 * Each (solver, N) pair runs ConfinedSquare at constant density
 * (D = 25 m * sqrt(N / 32)) and is timed from the first to the last step.
 * The scaling exponent is the least-squares slope of log(time) against log(N).
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "crowdsim/dynamics.hpp"
#include "crowdsim/scenario.hpp"
#include "crowdsim/scenario_io.hpp"

namespace crowdsim {

struct BenchConfig {
    std::vector<std::size_t> sizes{32, 128, 512, 2048};
    std::vector<SolverKind> solvers{solver::Hybrid{2, 4.0}, solver::Original{}};
    double dt = 0.0625;      ///< 2^-4 s
    double duration = 15.0;
    std::uint64_t seed = 0;
    unsigned jobs = 1;       ///< concurrent (solver, N) runs; a single run is never split
};

struct BenchRow {
    std::string solver;
    std::size_t n = 0;
    double width = 0.0;
    std::uint64_t steps = 0;
    double seconds = 0.0;
    double energy_loss = 0.0;
};

struct BenchSlope {
    std::string solver;
    double slope = 0.0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::vector<BenchSlope> slopes;  ///< empty for solvers timed at fewer than two sizes
};

/// Least-squares slope of log(y) against log(x); nullopt with fewer than two distinct x.
inline std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 2) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

inline BenchRow bench_one(const SolverKind& solver, std::size_t n, const BenchConfig& cfg) {
    const double width = builtin::confined_width_for(n);
    const Scenario sc = builtin::confined_square(n, width, cfg.seed);
    Simulation sim(sc.particles, sc.obstacles, sc.params, solver, cfg.dt, cfg.seed, sc.domain);
    const std::uint64_t steps = step_count(cfg.duration, cfg.dt);
    double loss = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t k = 0; k < steps; ++k) loss = sim.advance().energy_loss_cum;
    const auto t1 = std::chrono::steady_clock::now();
    return {solver_name(solver), n, width, steps, std::chrono::duration<double>(t1 - t0).count(), loss};
}

inline BenchReport run_bench(const BenchConfig& cfg) {
    for (const auto& s : cfg.solvers) validate_solver(s);
    if (!(cfg.dt > 0.0) || !(cfg.duration > 0.0)) throw ValidationError("bench needs dt > 0 and duration > 0");
    struct Job {
        std::size_t solver;
        std::size_t size;
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < cfg.solvers.size(); ++s)
        for (std::size_t k = 0; k < cfg.sizes.size(); ++k) jobs.push_back({s, k});

    std::vector<BenchRow> rows(jobs.size());
    std::size_t next = 0;
    std::mutex m;
    auto worker = [&] {
        for (;;) {
            std::size_t j;
            {
                std::lock_guard lock(m);
                if (next == jobs.size()) return;
                j = next++;
            }
            rows[j] = bench_one(cfg.solvers[jobs[j].solver], cfg.sizes[jobs[j].size], cfg);
        }
    };
    const unsigned nthreads = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(jobs.size())));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    BenchReport report{rows, {}};
    for (const auto& s : cfg.solvers) {
        const std::string name = solver_name(s);
        std::vector<double> x, y;
        for (const auto& r : rows)
            if (r.solver == name) {
                x.push_back(static_cast<double>(r.n));
                y.push_back(r.seconds);
            }
        if (auto slope = loglog_slope(x, y)) report.slopes.push_back({name, *slope});
    }
    return report;
}

inline void write_bench_csv(const BenchReport& r, std::ostream& timings, std::ostream& slopes) {
    timings << "solver,n,width,steps,wall_seconds,energy_loss\n";
    for (const auto& row : r.rows)
        timings << row.solver << ',' << row.n << ',' << fmt9(row.width) << ',' << row.steps << ','
                << fmt9(row.seconds) << ',' << fmt9(row.energy_loss) << '\n';
    slopes << "solver,slope\n";
    for (const auto& s : r.slopes) slopes << s.solver << ',' << fmt9(s.slope) << '\n';
}

}  // namespace crowdsim
