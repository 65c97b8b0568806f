// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.
//
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "crowdsim/crowdsim.hpp"

using namespace crowdsim;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double median3(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

Vec2 random_vec(CounterRng& rng, double lo, double hi) { return {rng.uniform(lo, hi), rng.uniform(lo, hi)}; }

// 1. Wall-clock scaling on the constant-density confined square.
Outcome complexity_scaling() {
    BenchConfig cfg;
    cfg.sizes = {32, 128, 512, 2048};
    cfg.solvers = {solver::Hybrid{2, 4.0}, solver::Original{}};
    cfg.dt = 1.0 / 16;
    cfg.duration = 15.0;
    cfg.seed = 1;
    const BenchReport r = run_bench(cfg);
    double hybrid = NAN, original = NAN;
    for (const auto& s : r.slopes) {
        if (s.solver == "hybrid") hybrid = s.slope;
        if (s.solver == "original") original = s.slope;
    }
    std::ostringstream d;
    d << "slopes hybrid=" << fmt("%.3f", hybrid) << " (want [0.7,1.4]) original=" << fmt("%.3f", original)
      << " (want [1.7,2.3]); times";
    for (const auto& row : r.rows) d << ' ' << row.solver << '@' << row.n << '=' << fmt("%.3fs", row.seconds);
    return {hybrid >= 0.7 && hybrid <= 1.4 && original >= 1.7 && original <= 2.3, d.str()};
}

// 2. Degenerate solver settings reproduce the all-pairs forces.
Outcome solver_degeneracy() {
    const ModelParams p;
    CounterRng rng(0xD15EA5E);
    double worst = 0.0;
    for (int scene = 0; scene < 50; ++scene) {
        const std::size_t n = 2 + rng.uniform_below(63);  // 2..64
        const double width = 4.0 + std::sqrt(static_cast<double>(n)) * 2.0;
        std::vector<ParticleState> s;
        while (s.size() < n) {
            const Vec2 x = random_vec(rng, 0.0, width);
            bool ok = true;
            for (const auto& q : s) ok = ok && norm(q.position - x) >= 1.0;
            if (!ok) continue;
            ParticleState ps;
            ps.id = static_cast<int>(s.size());
            ps.position = x;
            ps.speed = rng.uniform(0.0, 1.5);
            ps.heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
            ps.waypoints = {random_vec(rng, 0.0, width)};
            s.push_back(ps);
        }
        std::vector<Obstacle> obs;
        if (scene % 2 == 0) obs.push_back({Circle{{-2.0, width / 2}, 1.0}, {}});
        std::vector<Vec2> pos;
        for (const auto& q : s) pos.push_back(q.position);
        const int N = static_cast<int>(n);
        const double diameter = width * std::sqrt(2.0);
        CounterRng r0(1);
        const auto ref = compute_forces(s, obs, p, NeighborContext(solver::Original{}, pos, r0));
        for (const SolverKind kind : {SolverKind{solver::RBM{std::max(N, 2)}}, SolverKind{solver::Hybrid{N, 4.0}},
                                      SolverKind{solver::ShortForce{diameter}}}) {
            CounterRng r(static_cast<std::uint64_t>(scene) + 100);
            const auto f = compute_forces(s, obs, p, NeighborContext(kind, pos, r));
            for (std::size_t i = 0; i < n; ++i) worst = std::max({worst, std::abs(f[i].x - ref[i].x), std::abs(f[i].y - ref[i].y)});
        }
    }
    return {worst <= 1e-12, "max |F - F_original| = " + fmt("%.3g", worst) + " over 50 scenes (want <= 1e-12)"};
}

// 3. Circle: no collisions, everyone within 1 m of the goal at t = 13 s.
Outcome circle_scenario() {
    const Scenario sc = builtin::circle();
    const double dt = 1.0 / 128;
    Simulation sim(sc.particles, sc.obstacles, sc.params, solver::Hybrid{2, 4.0}, dt, 0, sc.domain);
    const auto steps = step_count(13.0, dt);
    StepDiagnostics d;
    for (std::uint64_t k = 0; k < steps; ++k) d = sim.advance();
    double worst = 0.0;
    for (const auto& s : sim.states()) worst = std::max(worst, norm(s.position - s.waypoints.back()));
    return {d.energy_loss_cum == 0.0 && worst <= 1.0,
            "energy_loss_cum=" + fmt("%.3g", d.energy_loss_cum) + " max distance to goal at t=13s=" + fmt("%.3f m", worst)};
}

struct SquareRun {
    double loss = 0.0;
    double l2_initial = 0.0;
    double l2_min = 0.0;
    double l2_max = 0.0;
};

SquareRun confined_run(const SolverKind& kind, double dt, std::uint64_t seed) {
    const Scenario sc = builtin::confined_square(500, 50.0, seed);
    Simulation sim(sc.particles, sc.obstacles, sc.params, kind, dt, seed, sc.domain);
    SquareRun r;
    r.l2_initial = r.l2_min = r.l2_max = sim.current_diagnostics().l2_norm;
    const auto steps = step_count(15.0, dt);
    for (std::uint64_t k = 0; k < steps; ++k) {
        const auto d = sim.advance();
        r.loss = d.energy_loss_cum;
        r.l2_min = std::min(r.l2_min, d.l2_norm);
        r.l2_max = std::max(r.l2_max, d.l2_norm);
    }
    return r;
}

const std::vector<std::uint64_t> kSeeds{1, 2, 3};

std::vector<SquareRun>& hybrid_coarse_runs() {
    static std::vector<SquareRun> runs = [] {
        std::vector<SquareRun> out;
        for (auto seed : kSeeds) out.push_back(confined_run(solver::Hybrid{2, 4.0}, 1.0 / 16, seed));
        return out;
    }();
    return runs;
}

// 4. Hybrid energy loss shrinks with the time step.
Outcome energy_loss_trend() {
    std::vector<double> ratios;
    std::ostringstream d;
    for (std::size_t k = 0; k < kSeeds.size(); ++k) {
        const double coarse = hybrid_coarse_runs()[k].loss;
        const double fine = confined_run(solver::Hybrid{2, 4.0}, 1.0 / 128, kSeeds[k]).loss;
        ratios.push_back(coarse > 0.0 ? fine / coarse : (fine == 0.0 ? 0.0 : INFINITY));
        d << "seed " << kSeeds[k] << ": loss(2^-4)=" << fmt("%.3f", coarse) << " loss(2^-7)=" << fmt("%.3f", fine)
          << "; ";
    }
    const double m = median3(ratios);
    d << "median ratio=" << fmt("%.3f", m) << " (want <= 0.5)";
    return {m <= 0.5, d.str()};
}

// 5. Hybrid keeps the L2 norm flat; RBM drifts above it.
Outcome l2_separation() {
    bool hybrid_flat = true;
    std::vector<double> gaps;
    std::ostringstream d;
    for (std::size_t k = 0; k < kSeeds.size(); ++k) {
        const SquareRun& h = hybrid_coarse_runs()[k];
        const SquareRun r = confined_run(solver::RBM{2}, 1.0 / 16, kSeeds[k]);
        const double dev = std::max(h.l2_max / h.l2_initial - 1.0, 1.0 - h.l2_min / h.l2_initial);
        hybrid_flat = hybrid_flat && dev <= 0.25;
        gaps.push_back(r.l2_max - h.l2_max);
        d << "seed " << kSeeds[k] << ": hybrid dev=" << fmt("%.2f%%", 100 * dev) << " max hybrid="
          << fmt("%.5f", h.l2_max) << " rbm=" << fmt("%.5f", r.l2_max) << "; ";
    }
    const double m = median3(gaps);
    d << "median(rbm max - hybrid max)=" << fmt("%.3g", m);
    return {hybrid_flat && m > 0.0, d.str()};
}

// 6. Restitution micro-oracle and momentum conservation.
Outcome collision_oracle() {
    const ModelParams p;
    auto make = [](Vec2 x, double speed, double heading) {
        ParticleState s;
        s.position = x;
        s.speed = speed;
        s.heading = heading;
        return s;
    };
    std::vector<ParticleState> pair{make({0, 0}, 1.0, 0.0), make({0.9, 0}, 1.0, std::numbers::pi)};
    const auto r = resolve_collisions(pair, {}, p);
    const double e1 = std::max({std::abs(pair[0].velocity().x + 0.8), std::abs(pair[1].velocity().x - 0.8),
                                std::abs(pair[0].velocity().y), std::abs(pair[1].velocity().y),
                                std::abs(r.energy_loss - 0.36)});
    CounterRng rng(606);
    double worst = 0.0;
    int events = 0;
    while (events < 1000) {
        const Vec2 xi = random_vec(rng, -1, 1);
        const Vec2 off = unit_from_angle(rng.uniform(-std::numbers::pi, std::numbers::pi)) * rng.uniform(0.05, 0.99);
        std::vector<ParticleState> s{make(xi, rng.uniform(0, 2), rng.uniform(-3.2, 3.2)),
                                     make(xi + off, rng.uniform(0, 2), rng.uniform(-3.2, 3.2))};
        const Vec2 m0 = s[0].velocity() + s[1].velocity();
        if (resolve_collisions(s, {}, p).count == 0) continue;
        const Vec2 m1 = s[0].velocity() + s[1].velocity();
        worst = std::max({worst, std::abs(m1.x - m0.x), std::abs(m1.y - m0.y)});
        ++events;
    }
    return {e1 <= 1e-12 && worst <= 1e-12,
            "head-on error=" + fmt("%.3g", e1) + " max momentum error over 1000 collisions=" + fmt("%.3g", worst)};
}

// 7. Perception quantities against a brute-force minimiser, set inclusions.
Outcome perception_oracle() {
    const ModelParams p;
    CounterRng rng(707);
    double worst_D = 0.0, worst_tau = 0.0;
    int compared = 0, inclusion_failures = 0;
    for (int k = 0; k < 1000; ++k) {
        const Vec2 xi = random_vec(rng, -10, 10), xj = random_vec(rng, -10, 10);
        const Vec2 vi = random_vec(rng, -2, 2), vj = random_vec(rng, -2, 2);
        const PairAssessment a = assess_pair(xi, vi, xj, vj, p);
        const Membership m = classify(a, p);
        // Im implies the Co conditions; Co and Fo are mutually exclusive.
        const bool co_cond = a.in_cone && !a.degenerate && a.tau >= 0.0 && a.D < p.R;
        const bool fo_cond = a.in_cone && (a.degenerate || a.tau < 0.0) && a.d < p.R_Fo;
        if ((m == Membership::Im && !co_cond) || (co_cond && fo_cond) ||
            ((m == Membership::Co || m == Membership::Im) && !co_cond) || (m == Membership::Fo && !fo_cond))
            ++inclusion_failures;
        if (a.degenerate || a.tau < 0.0 || a.tau > 100.0) continue;
        const Vec2 z = xj - xi, u = vj - vi;
        double best_t = 0.0, best_d = norm(z);
        for (int s = 1; s <= 1000000; ++s) {
            const double t = s * 1e-4;
            const double dd = norm(z + u * t);
            if (dd < best_d) {
                best_d = dd;
                best_t = t;
            }
        }
        worst_D = std::max(worst_D, std::abs(a.D - best_d));
        worst_tau = std::max(worst_tau, std::abs(a.tau - best_t));
        ++compared;
    }
    // the same inclusions on full interaction sets of random crowds
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ParticleState> s(20);
        for (auto& q : s) {
            q.position = random_vec(rng, 0, 8);
            q.speed = rng.uniform(0, 1.5);
            q.heading = rng.uniform(-3.2, 3.2);
        }
        const auto snap = Snapshot::of(s);
        std::vector<std::size_t> pool;
        for (std::size_t j = 1; j < s.size(); ++j) pool.push_back(j);
        const auto sets = build_sets(0, snap, pool, {}, p);
        std::set<std::size_t> co, fo;
        for (const auto& n : sets.co) co.insert(n.index);
        for (const auto& n : sets.fo) fo.insert(n.index);
        for (const auto& n : sets.im)
            if (!co.count(n.index)) ++inclusion_failures;
        for (std::size_t j : fo)
            if (co.count(j)) ++inclusion_failures;
    }
    return {worst_D <= 1e-3 && worst_tau <= 1e-3 && inclusion_failures == 0 && compared > 0,
            std::to_string(compared) + " pairs with tau in [0,100]: max|D err|=" + fmt("%.2g", worst_D) +
                " max|tau err|=" + fmt("%.2g", worst_tau) + " set violations=" + std::to_string(inclusion_failures)};
}

// 8. Heun order on ds/dt = 1 - s.
Outcome integrator_order() {
    const ModelParams p;
    auto error_at_5 = [&](double dt) {
        ParticleState s;
        s.waypoints = {{1000.0, 0.0}};
        auto force = [&](const ParticleState& q) {
            return exit_force({q.position, q.speed, q.heading_vector()}, &s.waypoints[0], p);
        };
        for (std::uint64_t k = 0; k < step_count(5.0, dt); ++k) {
            const ParticleState nx = integrate_polar(s, force, dt, p.eps_speed);
            s.position = nx.position;
            s.speed = nx.speed;
            s.heading = nx.heading;
        }
        return std::abs(s.speed - (1.0 - std::exp(-5.0))) + std::abs(s.position.x - (4.0 + std::exp(-5.0)));
    };
    std::vector<double> err;
    for (int k = 4; k <= 7; ++k) err.push_back(error_at_5(std::ldexp(1.0, -k)));
    bool ok = true;
    std::string d = "ratios";
    for (std::size_t k = 0; k + 1 < err.size(); ++k) {
        const double r = err[k] / err[k + 1];
        ok = ok && r >= 3.0 && r <= 5.0;
        d += ' ' + fmt("%.3f", r);
    }
    return {ok, d + " (want each in [3,5])"};
}

// 9. Identical runs write identical bytes.
Outcome determinism() {
    const Scenario sc = builtin_scenario("ConfinedSquare", 128, std::nullopt, 9);
    RunConfig cfg;
    cfg.solver = solver::Hybrid{2, 4.0};
    cfg.dt = 1.0 / 16;
    cfg.duration = 5.0;
    cfg.seed = 42;
    const auto base = std::filesystem::temp_directory_path() / "crowdsim_acceptance";
    std::filesystem::remove_all(base);
    write_outputs(sc, cfg, base / "a");
    write_outputs(sc, cfg, base / "b");
    bool same = true;
    std::size_t bytes = 0;
    for (const char* f : {"trajectory.csv", "metrics.csv", "manifest.json"}) {
        const std::string x = read_file(base / "a" / f), y = read_file(base / "b" / f);
        same = same && x == y;
        bytes += x.size();
    }
    std::filesystem::remove_all(base);
    return {same, std::to_string(bytes) + " bytes compared"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"complexity scaling", complexity_scaling},
        {"solver degeneracy", solver_degeneracy},
        {"circle scenario", circle_scenario},
        {"energy-loss dt trend", energy_loss_trend},
        {"L2-norm separation", l2_separation},
        {"collision micro-oracle", collision_oracle},
        {"perception oracle", perception_oracle},
        {"integrator order", integrator_order},
        {"determinism", determinism},
    };
    std::set<int> only;
    for (int k = 1; k < argc; ++k) only.insert(std::atoi(argv[k]));

    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!only.empty() && !only.count(id)) continue;
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
