#pragma once
/**
 * @file dynamics.hpp
 * @brief Time stepping: Heun integration in polar velocity form, inelastic
 *        disc collisions, waypoint bookkeeping.
 *
 * Per particle the state is (x, s, theta) with v = s (cos theta, sin theta):
 *
 *     dx/dt = s e_rho,   ds/dt = <F, e_rho>,   dtheta/dt = <F, e_phi> / s
 *
 * One step of size dt:
 *   1. forces on the time-t snapshot, Euler predictor for every particle;
 *   2. forces on the predictor snapshot, corrector with the averaged slopes;
 *   3. pairwise restitution for overlapping closing pairs, ascending (i, j);
 *   4. particle/obstacle restitution, ascending particle index;
 *   5. waypoint advancement and diagnostics.
 * Batches and cells are drawn once per step and shared by both stages.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "crowdsim/diagnostics.hpp"
#include "crowdsim/forces.hpp"
#include "crowdsim/geometry.hpp"
#include "crowdsim/neighbors.hpp"
#include "crowdsim/params.hpp"
#include "crowdsim/perception.hpp"
#include "crowdsim/rng.hpp"
#include "crowdsim/state.hpp"
#include "crowdsim/vec2.hpp"

namespace crowdsim {

/// Raised when the state becomes non-finite.
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Axis-aligned rectangle [min, max].
struct Rect {
    Vec2 min;
    Vec2 max;
    bool operator==(const Rect&) const = default;
};

/// Total force on every particle of `states` for the given neighbour structures.
inline std::vector<Vec2> compute_forces(std::span<const ParticleState> states,
                                        std::span<const Obstacle> obstacles,
                                        const ModelParams& params, const NeighborContext& neighbors) {
    const Snapshot snap = Snapshot::of(states);
    std::vector<Vec2> forces(states.size());
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < states.size(); ++i) {
        neighbors.pool(i, pool);
        const InteractionSets sets = build_sets(i, snap, pool, obstacles, params);
        const Kinematics k{states[i].position, states[i].speed, snap.heading[i]};
        const Vec2* target = states[i].has_target() ? &states[i].target() : nullptr;
        forces[i] = total_force(k, sets, target, params);
    }
    return forces;
}

struct PolarRates {
    Vec2 dx;
    double ds = 0.0;
    double dtheta = 0.0;
};

/// Slopes of (x, s, theta) under force f. The heading is frozen below eps_speed.
inline PolarRates polar_rates(double speed, double heading, const Vec2& f, double eps_speed) {
    const LocalFrame fr = LocalFrame::from_heading(heading);
    PolarRates r;
    r.dx = fr.e_rho * speed;
    r.ds = dot(f, fr.e_rho);
    r.dtheta = speed < eps_speed ? 0.0 : dot(f, fr.e_phi) / speed;
    return r;
}

/**
 * A particle at rest has no direction of motion; it starts moving along the
 * force acting on it. Re-aims the heading of a near-stationary particle.
 */
inline void aim_if_resting(ParticleState& s, const Vec2& f, double eps_speed) {
    if (s.speed < eps_speed && norm_sq(f) > 0.0) s.heading = bearing_angle(f, Vec2{1.0, 0.0});
}

/// Forward-Euler stage from `base` with the given slopes (speed clamped at 0).
inline void apply_stage(ParticleState& out, const ParticleState& base, const PolarRates& r, double dt) {
    out.position = base.position + r.dx * dt;
    out.speed = std::max(base.speed + r.ds * dt, 0.0);
    out.heading = wrap_angle(base.heading + r.dtheta * dt);
}

/**
 * One Heun step of a single particle against a force field that is a function
 * of the particle state only (the simulation loop applies the same scheme to
 * all particles synchronously).
 */
inline ParticleState integrate_polar(const ParticleState& state,
                                     const std::function<Vec2(const ParticleState&)>& force,
                                     double dt, double eps_speed) {
    ParticleState base = state;
    const Vec2 f1 = force(base);
    aim_if_resting(base, f1, eps_speed);
    const PolarRates r1 = polar_rates(base.speed, base.heading, f1, eps_speed);
    ParticleState pred = base;
    apply_stage(pred, base, r1, dt);
    const Vec2 f2 = force(pred);
    const PolarRates r2 = polar_rates(pred.speed, pred.heading, f2, eps_speed);
    const PolarRates avg{(r1.dx + r2.dx) * 0.5, 0.5 * (r1.ds + r2.ds), 0.5 * (r1.dtheta + r2.dtheta)};
    ParticleState out = base;
    apply_stage(out, base, avg, dt);
    return out;
}

struct CollisionReport {
    std::size_t count = 0;
    double energy_loss = 0.0;
};

namespace detail {

inline void set_velocity(ParticleState& s, const Vec2& v, double eps_speed) {
    s.speed = norm(v);
    if (s.speed >= eps_speed) s.heading = bearing_angle(v, Vec2{1.0, 0.0});
}

}  // namespace detail

/**
 * Inelastic restitution for every overlapping (d < 2 R0) pair whose normal
 * relative velocity is closing. Unit masses; along the centre line
 *
 *     v_i' = ((1 - e) v_i + (1 + e) v_j) / 2,   v_j' = ((1 + e) v_i + (1 - e) v_j) / 2,
 *
 * tangential components untouched, no positional correction. Pairs are
 * processed sequentially in ascending (i, j) order. Obstacles are immovable:
 * a disc touching one (surface clearance < R0) while closing has its normal
 * relative velocity reversed and scaled by e.
 *
 * The dissipated energy of a pair event is (1 - e^2)/4 * (normal closing speed)^2,
 * which equals the kinetic energy drop of the pair.
 */
inline CollisionReport resolve_collisions(std::span<ParticleState> states,
                                          std::span<const Obstacle> obstacles,
                                          const ModelParams& params) {
    CollisionReport report;
    const double contact = 2.0 * params.R0;
    const double e = params.e_c;

    std::vector<Vec2> pos(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) pos[i] = states[i].position;

    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    if (states.size() > 1) {
        const CellGrid grid = build_grid(pos, contact);
        std::vector<std::size_t> near;
        for (std::size_t i = 0; i < states.size(); ++i) {
            near.clear();
            grid.gather_moore(grid.cell_of_particle[i], near);
            for (std::size_t j : near)
                if (j > i && norm_sq(pos[j] - pos[i]) < contact * contact) candidates.emplace_back(i, j);
        }
        std::sort(candidates.begin(), candidates.end());
    }

    for (const auto& [i, j] : candidates) {
        const Vec2 z = pos[j] - pos[i];
        const double d = norm(z);
        if (d == 0.0) continue;  // no centre line
        const Vec2 n = z / d;
        const Vec2 vi = states[i].velocity();
        const Vec2 vj = states[j].velocity();
        const double ui = dot(vi, n);
        const double uj = dot(vj, n);
        if (!(uj - ui < 0.0)) continue;  // separating or grazing
        const double ui_new = 0.5 * ((1.0 - e) * ui + (1.0 + e) * uj);
        const double uj_new = 0.5 * ((1.0 + e) * ui + (1.0 - e) * uj);
        detail::set_velocity(states[i], vi + n * (ui_new - ui), params.eps_speed);
        detail::set_velocity(states[j], vj + n * (uj_new - uj), params.eps_speed);
        report.count += 1;
        report.energy_loss += 0.25 * (1.0 - e * e) * (uj - ui) * (uj - ui);
    }

    for (std::size_t i = 0; i < states.size(); ++i) {
        for (const auto& ob : obstacles) {
            if (!(surface_distance(ob, pos[i]) < params.R0)) continue;
            Vec2 n;
            if (const auto* c = std::get_if<Circle>(&ob.shape)) {
                n = pos[i] - c->center;
            } else {
                n = pos[i] - closest_boundary_point(ob, pos[i]);
            }
            const double len = norm(n);
            if (len == 0.0) continue;
            n = n / len;
            const Vec2 v = states[i].velocity();
            const double un = dot(v - ob.velocity, n);
            if (!(un < 0.0)) continue;
            detail::set_velocity(states[i], v - n * ((1.0 + e) * un), params.eps_speed);
            report.count += 1;
            report.energy_loss += 0.5 * (1.0 - e * e) * un * un;
        }
    }
    return report;
}

/// Moves the waypoint cursor of a particle that reached its current waypoint.
inline void advance_waypoint(ParticleState& s, const ModelParams& params, double t) {
    if (!s.has_target()) return;
    if (!(norm(s.position - s.target()) < params.waypoint_radius)) return;
    if (s.cyclic) {
        s.waypoint_cursor = (s.waypoint_cursor + 1) % s.waypoints.size();
    } else if (s.waypoint_cursor + 1 < s.waypoints.size()) {
        ++s.waypoint_cursor;
    } else if (!s.arrived_at) {
        s.arrived_at = t;
    }
}

/// Configuration-only diagnostics (no collision data).
inline StepDiagnostics measure(std::span<const ParticleState> states, const ModelParams& params, double t) {
    std::vector<Vec2> pos(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) pos[i] = states[i].position;
    StepDiagnostics d;
    d.t = t;
    d.overlap_pairs = overlap_count(pos, params.R0);
    d.l2_norm = l2_norm_grid(pos);
    return d;
}

struct StepInput {
    const ModelParams& params;
    SolverKind solver;
    double dt = 0.0;
    double t = 0.0;                 ///< time at the start of the step
    std::optional<Rect> domain;     ///< positions are clamped inside when set
};

/**
 * Advances all particles (and moving obstacles) by one step. `rng` supplies
 * the batch shuffle of this step. Returns the diagnostics of the new state
 * with energy_loss_cum left at 0 for the caller to accumulate.
 */
inline StepDiagnostics step(std::vector<ParticleState>& states, std::vector<Obstacle>& obstacles,
                            const StepInput& in, CounterRng& rng) {
    const ModelParams& p = in.params;
    const double dt = in.dt;
    if (!(dt > 0.0)) throw ValidationError("time step must be > 0");
    const std::size_t n = states.size();

    std::vector<Vec2> pos(n);
    for (std::size_t i = 0; i < n; ++i) pos[i] = states[i].position;
    const NeighborContext neighbors(in.solver, pos, rng);

    // Predictor.
    const std::vector<Vec2> f1 = compute_forces(states, obstacles, p, neighbors);
    std::vector<ParticleState> base = states;
    std::vector<PolarRates> r1(n);
    std::vector<ParticleState> pred = states;
    for (std::size_t i = 0; i < n; ++i) {
        aim_if_resting(base[i], f1[i], p.eps_speed);
        r1[i] = polar_rates(base[i].speed, base[i].heading, f1[i], p.eps_speed);
        apply_stage(pred[i], base[i], r1[i], dt);
    }

    std::vector<Obstacle> obstacles_next = obstacles;
    for (auto& ob : obstacles_next) ob.translate(ob.velocity * dt);

    // Corrector.
    const std::vector<Vec2> f2 = compute_forces(pred, obstacles_next, p, neighbors);
    for (std::size_t i = 0; i < n; ++i) {
        const PolarRates r2 = polar_rates(pred[i].speed, pred[i].heading, f2[i], p.eps_speed);
        const PolarRates avg{(r1[i].dx + r2.dx) * 0.5, 0.5 * (r1[i].ds + r2.ds),
                             0.5 * (r1[i].dtheta + r2.dtheta)};
        apply_stage(states[i], base[i], avg, dt);
        if (in.domain) {
            const Rect& dom = *in.domain;
            states[i].position.x = std::clamp(states[i].position.x, dom.min.x + p.R0, dom.max.x - p.R0);
            states[i].position.y = std::clamp(states[i].position.y, dom.min.y + p.R0, dom.max.y - p.R0);
        }
    }
    obstacles = std::move(obstacles_next);

    const CollisionReport col = resolve_collisions(states, obstacles, p);
    const double t_new = in.t + dt;
    for (auto& s : states) advance_waypoint(s, p, t_new);

    for (const auto& s : states) {
        if (!is_finite(s.position) || !std::isfinite(s.speed) || !std::isfinite(s.heading)) {
            throw SimulationError("particle " + std::to_string(s.id) + " has a non-finite state at t=" +
                                  std::to_string(t_new));
        }
    }

    StepDiagnostics d = measure(states, p, t_new);
    d.collision_count = col.count;
    d.energy_loss_step = col.energy_loss;
    return d;
}

/// Owns a running simulation: state, step counter and cumulative diagnostics.
class Simulation {
public:
    Simulation(std::vector<ParticleState> states, std::vector<Obstacle> obstacles, ModelParams params,
               SolverKind solver, double dt, std::uint64_t seed, std::optional<Rect> domain = std::nullopt)
        : states_(std::move(states)),
          obstacles_(std::move(obstacles)),
          params_(params),
          solver_(solver),
          dt_(dt),
          rng_(seed),
          domain_(domain) {
        params_.validate();
        validate_solver(solver_);
        if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw ValidationError("time step must be > 0");
    }

    /// Diagnostics of the current state without stepping (collision fields zero).
    StepDiagnostics current_diagnostics() const {
        StepDiagnostics d = measure(states_, params_, time());
        d.energy_loss_cum = energy_loss_cum_;
        return d;
    }

    StepDiagnostics advance() {
        CounterRng step_rng = rng_.split(steps_);
        StepDiagnostics d = step(states_, obstacles_, StepInput{params_, solver_, dt_, time(), domain_}, step_rng);
        ++steps_;
        d.t = time();
        energy_loss_cum_ += d.energy_loss_step;
        d.energy_loss_cum = energy_loss_cum_;
        return d;
    }

    double time() const { return static_cast<double>(steps_) * dt_; }
    std::uint64_t steps_taken() const { return steps_; }
    double dt() const { return dt_; }
    const std::vector<ParticleState>& states() const { return states_; }
    const std::vector<Obstacle>& obstacles() const { return obstacles_; }
    const ModelParams& params() const { return params_; }
    const SolverKind& solver() const { return solver_; }

private:
    std::vector<ParticleState> states_;
    std::vector<Obstacle> obstacles_;
    ModelParams params_;
    SolverKind solver_;
    double dt_;
    CounterRng rng_;
    std::optional<Rect> domain_;
    std::uint64_t steps_ = 0;
    double energy_loss_cum_ = 0.0;
};

}  // namespace crowdsim
