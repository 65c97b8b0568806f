#pragma once
/**
 * @file scenario_io.hpp
 * @brief JSON scenarios, CSV trajectory/metrics output and run manifests.
 *
 * Scenario document (all keys except "particles" optional, unknown keys rejected):
 *
 *   {
 *     "name": "demo",
 *     "duration": 15.0,
 *     "domain": {"min": [0, 0], "max": [50, 50]},
 *     "params": {"C2": 0.0, "C4": 0.0},
 *     "particles": [
 *       {"position": [0, 0], "speed": 1.0, "heading": 0.0,
 *        "waypoints": [[10, 0]], "cyclic": false, "cursor": 0}
 *     ],
 *     "obstacles": [
 *       {"circle": {"center": [5, 3], "radius": 1.0}, "velocity": [0, 0]},
 *       {"segment": {"a": [0, -5], "b": [20, -5]}}
 *     ]
 *   }
 *
 * Particle ids are their positions in the list. "heading" defaults to the
 * direction of the first waypoint.
 */

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "crowdsim/diagnostics.hpp"
#include "crowdsim/dynamics.hpp"
#include "crowdsim/neighbors.hpp"
#include "crowdsim/params.hpp"
#include "crowdsim/scenario.hpp"

namespace crowdsim {

using json = nlohmann::json;

/// Raised for file-system failures; the message carries the path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace io_detail {

inline void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ValidationError(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ValidationError(where + ": unknown key '" + it.key() + "'");
    }
}

inline double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ValidationError(where + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError(where + ": non-finite number");
    return d;
}

inline Vec2 vec(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2) throw ValidationError(where + ": expected [x, y]");
    return {number(v[0], where + "[0]"), number(v[1], where + "[1]")};
}

inline json vec_json(const Vec2& v) { return json::array({v.x, v.y}); }

#define CROWDSIM_PARAM_FIELDS(X) \
    X(kappa) X(R0) X(R) X(R0_Im) X(R_Im) X(R_Fo) X(C0) X(C1) X(C2) X(C3) X(C4) X(C5) \
    X(delta0) X(delta1) X(beta) X(sigma) X(e_c) X(eps_relvel) X(eps_speed) X(eps_target) X(waypoint_radius)

}  // namespace io_detail

inline json params_to_json(const ModelParams& p) {
    json j = json::object();
#define X(f) j[#f] = p.f;
    CROWDSIM_PARAM_FIELDS(X)
#undef X
    return j;
}

/// Applies overrides from `j` on top of `base`; unknown names are rejected.
inline ModelParams params_from_json(const json& j, ModelParams base = {}) {
    if (!j.is_object()) throw ValidationError("params: expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const std::string where = "params." + k;
        bool known = false;
#define X(f) \
    if (k == #f) { base.f = io_detail::number(it.value(), where); known = true; }
        CROWDSIM_PARAM_FIELDS(X)
#undef X
        if (!known) throw ValidationError("params: unknown key '" + k + "'");
    }
    return base;
}

inline json obstacle_to_json(const Obstacle& o) {
    json j;
    if (const auto* c = std::get_if<Circle>(&o.shape)) {
        j["circle"] = {{"center", io_detail::vec_json(c->center)}, {"radius", c->radius}};
    } else {
        const auto& s = std::get<Segment>(o.shape);
        j["segment"] = {{"a", io_detail::vec_json(s.a)}, {"b", io_detail::vec_json(s.b)}};
    }
    j["velocity"] = io_detail::vec_json(o.velocity);
    return j;
}

inline json scenario_to_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["duration"] = s.duration;
    if (s.domain) j["domain"] = {{"min", io_detail::vec_json(s.domain->min)}, {"max", io_detail::vec_json(s.domain->max)}};
    j["params"] = params_to_json(s.params);
    json parts = json::array();
    for (const auto& p : s.particles) {
        json wp = json::array();
        for (const auto& w : p.waypoints) wp.push_back(io_detail::vec_json(w));
        parts.push_back({{"position", io_detail::vec_json(p.position)},
                         {"speed", p.speed},
                         {"heading", p.heading},
                         {"waypoints", wp},
                         {"cyclic", p.cyclic},
                         {"cursor", p.waypoint_cursor}});
    }
    j["particles"] = parts;
    json obs = json::array();
    for (const auto& o : s.obstacles) obs.push_back(obstacle_to_json(o));
    j["obstacles"] = obs;
    return j;
}

/// Builds and validates a scenario from a parsed document.
inline Scenario scenario_from_json(const json& j) {
    using namespace io_detail;
    reject_unknown(j, {"name", "duration", "domain", "params", "particles", "obstacles"}, "scenario");
    Scenario s;
    s.name = j.value("name", std::string("scenario"));
    if (j.contains("duration")) s.duration = number(j["duration"], "duration");
    if (j.contains("params")) s.params = params_from_json(j["params"]);
    if (j.contains("domain")) {
        const json& d = j["domain"];
        reject_unknown(d, {"min", "max"}, "domain");
        if (!d.contains("min") || !d.contains("max")) throw ValidationError("domain: needs min and max");
        s.domain = Rect{vec(d["min"], "domain.min"), vec(d["max"], "domain.max")};
    }
    if (!j.contains("particles") || !j["particles"].is_array()) throw ValidationError("scenario: 'particles' array required");
    int id = 0;
    for (const json& pj : j["particles"]) {
        const std::string where = "particles[" + std::to_string(id) + "]";
        reject_unknown(pj, {"position", "speed", "heading", "waypoints", "cyclic", "cursor"}, where);
        if (!pj.contains("position")) throw ValidationError(where + ": position required");
        ParticleState p;
        p.id = id;
        p.position = vec(pj["position"], where + ".position");
        if (pj.contains("speed")) p.speed = number(pj["speed"], where + ".speed");
        if (pj.contains("waypoints")) {
            if (!pj["waypoints"].is_array()) throw ValidationError(where + ".waypoints: expected an array");
            for (const json& w : pj["waypoints"]) p.waypoints.push_back(vec(w, where + ".waypoints"));
        }
        if (pj.contains("cyclic")) {
            if (!pj["cyclic"].is_boolean()) throw ValidationError(where + ".cyclic: expected a boolean");
            p.cyclic = pj["cyclic"].get<bool>();
        }
        if (pj.contains("cursor")) {
            if (!pj["cursor"].is_number_unsigned()) throw ValidationError(where + ".cursor: expected a non-negative integer");
            p.waypoint_cursor = pj["cursor"].get<std::size_t>();
        }
        if (pj.contains("heading")) {
            p.heading = wrap_angle(number(pj["heading"], where + ".heading"));
        } else if (!p.waypoints.empty() && p.waypoint_cursor < p.waypoints.size() &&
                   norm_sq(p.waypoints[p.waypoint_cursor] - p.position) > 0.0) {
            p.heading = bearing_angle(p.waypoints[p.waypoint_cursor] - p.position, Vec2{1.0, 0.0});
        }
        s.particles.push_back(std::move(p));
        ++id;
    }
    if (j.contains("obstacles")) {
        if (!j["obstacles"].is_array()) throw ValidationError("obstacles: expected an array");
        int k = 0;
        for (const json& oj : j["obstacles"]) {
            const std::string where = "obstacles[" + std::to_string(k++) + "]";
            reject_unknown(oj, {"circle", "segment", "velocity"}, where);
            Obstacle o;
            if (oj.contains("circle") == oj.contains("segment"))
                throw ValidationError(where + ": exactly one of circle/segment required");
            if (oj.contains("circle")) {
                const json& c = oj["circle"];
                reject_unknown(c, {"center", "radius"}, where + ".circle");
                if (!c.contains("center") || !c.contains("radius")) throw ValidationError(where + ".circle: center and radius required");
                o.shape = Circle{vec(c["center"], where + ".circle.center"), number(c["radius"], where + ".circle.radius")};
            } else {
                const json& sg = oj["segment"];
                reject_unknown(sg, {"a", "b"}, where + ".segment");
                if (!sg.contains("a") || !sg.contains("b")) throw ValidationError(where + ".segment: a and b required");
                o.shape = Segment{vec(sg["a"], where + ".segment.a"), vec(sg["b"], where + ".segment.b")};
            }
            if (oj.contains("velocity")) o.velocity = vec(oj["velocity"], where + ".velocity");
            s.obstacles.push_back(o);
        }
    }
    s.validate();
    return s;
}

inline Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed scenario document: ") + e.what());
    }
    return scenario_from_json(j);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Scenario load_scenario_file(const std::filesystem::path& path) { return parse_scenario(read_file(path)); }

/// "%.9g" formatting used for every floating point CSV field.
inline std::string fmt9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

/// FNV-1a over the canonical JSON dump of the parameters.
inline std::string params_hash(const ModelParams& p) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : params_to_json(p).dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return hex64(h);
}

inline json solver_to_json(const SolverKind& k) {
    json j{{"kind", solver_name(k)}};
    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, solver::RBM>) j["p"] = s.p;
            if constexpr (std::is_same_v<S, solver::ShortForce>) j["r_c"] = s.r_c;
            if constexpr (std::is_same_v<S, solver::Hybrid>) {
                j["p"] = s.p;
                j["r_c"] = s.r_c;
            }
        },
        k);
    return j;
}

/// Solver from its CLI name plus batch size and cell width.
inline SolverKind make_solver(const std::string& name, int p, double r_c) {
    SolverKind k;
    if (name == "original") k = solver::Original{};
    else if (name == "rbm") k = solver::RBM{p};
    else if (name == "short") k = solver::ShortForce{r_c};
    else if (name == "hybrid") k = solver::Hybrid{p, r_c};
    else throw ValidationError("unknown solver: " + name + " (original|rbm|short|hybrid)");
    validate_solver(k);
    return k;
}

class TrajectoryWriter {
public:
    explicit TrajectoryWriter(std::ostream& out) : out_(out) { out_ << "t,id,x,y,vx,vy\n"; }

    void write(double t, const std::vector<ParticleState>& states) {
        const std::string ts = fmt9(t);
        for (const auto& s : states) {
            const Vec2 v = s.velocity();
            out_ << ts << ',' << s.id << ',' << fmt9(s.position.x) << ',' << fmt9(s.position.y) << ','
                 << fmt9(v.x) << ',' << fmt9(v.y) << '\n';
        }
    }

private:
    std::ostream& out_;
};

class MetricsWriter {
public:
    explicit MetricsWriter(std::ostream& out) : out_(out) {
        out_ << "t,collisions,energy_loss_step,energy_loss_cum,overlap_pairs,l2_norm\n";
    }

    void write(const StepDiagnostics& d) {
        out_ << fmt9(d.t) << ',' << d.collision_count << ',' << fmt9(d.energy_loss_step) << ','
             << fmt9(d.energy_loss_cum) << ',' << d.overlap_pairs << ',' << fmt9(d.l2_norm) << '\n';
    }

private:
    std::ostream& out_;
};

struct RunConfig {
    SolverKind solver = solver::Hybrid{};
    double dt = 0.0078125;                 ///< 2^-7 s
    std::optional<double> duration;         ///< overrides the scenario duration
    std::uint64_t seed = 0;
    std::size_t stride = 1;                 ///< output every `stride` steps
};

struct RunMetadata {
    std::string scenario;
    std::string solver;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::size_t n = 0;
};

/// Rows of StepDiagnostics keyed by time, plus the run description.
struct MetricsSeries {
    RunMetadata meta;
    std::vector<StepDiagnostics> rows;
};

inline std::uint64_t step_count(double duration, double dt) {
    return static_cast<std::uint64_t>(std::llround(duration / dt));
}

inline json manifest_json(const Scenario& sc, const RunConfig& cfg) {
    const double duration = cfg.duration.value_or(sc.duration);
    return {{"scenario", sc.name},
            {"particles", sc.particles.size()},
            {"solver", solver_to_json(cfg.solver)},
            {"dt", cfg.dt},
            {"duration", duration},
            {"steps", step_count(duration, cfg.dt)},
            {"seed", cfg.seed},
            {"stride", cfg.stride},
            {"params", params_to_json(sc.params)},
            {"params_hash", params_hash(sc.params)}};
}

/**
 * Runs a scenario and streams the trajectory and metrics to the given sinks
 * (either may be null). Rows are written at t = 0 and every `stride` steps.
 */
inline MetricsSeries run_scenario(const Scenario& sc, const RunConfig& cfg, std::ostream* trajectory,
                                  std::ostream* metrics) {
    if (cfg.stride == 0) throw ValidationError("stride must be >= 1");
    const double duration = cfg.duration.value_or(sc.duration);
    if (!(duration > 0.0)) throw ValidationError("duration must be > 0");
    Simulation sim(sc.particles, sc.obstacles, sc.params, cfg.solver, cfg.dt, cfg.seed, sc.domain);
    std::optional<TrajectoryWriter> tw;
    std::optional<MetricsWriter> mw;
    if (trajectory) tw.emplace(*trajectory);
    if (metrics) mw.emplace(*metrics);

    MetricsSeries series{{sc.name, solver_name(cfg.solver), cfg.dt, cfg.seed, sc.particles.size()}, {}};
    const StepDiagnostics d0 = sim.current_diagnostics();
    series.rows.push_back(d0);
    if (tw) tw->write(0.0, sim.states());
    if (mw) mw->write(d0);

    const std::uint64_t steps = step_count(duration, cfg.dt);
    StepDiagnostics acc;
    for (std::uint64_t k = 1; k <= steps; ++k) {
        const StepDiagnostics d = sim.advance();
        acc.collision_count += d.collision_count;
        acc.energy_loss_step += d.energy_loss_step;
        if (k % cfg.stride == 0 || k == steps) {
            StepDiagnostics row = d;
            row.collision_count = acc.collision_count;
            row.energy_loss_step = acc.energy_loss_step;
            acc = {};
            series.rows.push_back(row);
            if (tw) tw->write(row.t, sim.states());
            if (mw) mw->write(row);
        }
    }
    return series;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

/// Writes trajectory.csv, metrics.csv and manifest.json into `dir`.
inline MetricsSeries write_outputs(const Scenario& sc, const RunConfig& cfg, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    const auto traj_path = dir / "trajectory.csv";
    const auto metr_path = dir / "metrics.csv";
    std::ofstream traj(traj_path, std::ios::binary);
    if (!traj) throw IoError("cannot write " + traj_path.string());
    std::ofstream metr(metr_path, std::ios::binary);
    if (!metr) throw IoError("cannot write " + metr_path.string());
    MetricsSeries series = run_scenario(sc, cfg, &traj, &metr);
    traj.flush();
    metr.flush();
    if (!traj) throw IoError("write failed: " + traj_path.string());
    if (!metr) throw IoError("write failed: " + metr_path.string());
    write_text(dir / "manifest.json", manifest_json(sc, cfg).dump(2) + "\n");
    return series;
}

}  // namespace crowdsim
