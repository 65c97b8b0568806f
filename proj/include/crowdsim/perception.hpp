#pragma once
/**
 * @file perception.hpp
 * @brief Interaction sets of a viewer: collision (Co), imminent (Im), following (Fo).
 *
 *   Co: in cone, tau >= 0, D < R
 *   Im: in cone, tau_tilde >= 0, D < R0_Im, d < R_Im     (always a subset of Co)
 *   Fo: in cone, tau < 0, d < R_Fo
 *
 * Pairs with (numerically) zero relative velocity carry no predicted closest
 * approach; they are treated like tau < 0 and can only enter Fo.
 *
 * Obstacles are perceived as pseudo-particles located at their equivalent
 * point (closest boundary point inside the cone) and only enter Co and Im.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <variant>
#include <vector>

#include "crowdsim/geometry.hpp"
#include "crowdsim/params.hpp"
#include "crowdsim/state.hpp"
#include "crowdsim/vec2.hpp"

namespace crowdsim {

struct Circle {
    Vec2 center;
    double radius = 1.0;
    bool operator==(const Circle&) const = default;
};

struct Segment {
    Vec2 a;
    Vec2 b;
    bool operator==(const Segment&) const = default;
};

/// Rigid body translating with a constant velocity (zero for static geometry).
struct Obstacle {
    std::variant<Circle, Segment> shape;
    Vec2 velocity;

    bool operator==(const Obstacle&) const = default;

    void validate() const {
        if (const auto* c = std::get_if<Circle>(&shape)) {
            if (!(c->radius > 0.0) || !is_finite(c->center) || !std::isfinite(c->radius))
                throw ValidationError("circle obstacle needs a finite centre and radius > 0");
        } else {
            const auto& s = std::get<Segment>(shape);
            if (!is_finite(s.a) || !is_finite(s.b) || s.a == s.b)
                throw ValidationError("segment obstacle needs two distinct finite end points");
        }
        if (!is_finite(velocity)) throw ValidationError("obstacle velocity must be finite");
    }

    void translate(const Vec2& dx) {
        std::visit(
            [&](auto& s) {
                if constexpr (std::is_same_v<std::decay_t<decltype(s)>, Circle>) {
                    s.center += dx;
                } else {
                    s.a += dx;
                    s.b += dx;
                }
            },
            shape);
    }
};

/// Closest boundary point of the obstacle to p (no cone restriction).
inline Vec2 closest_boundary_point(const Obstacle& o, const Vec2& p) {
    if (const auto* c = std::get_if<Circle>(&o.shape)) {
        const Vec2 r = p - c->center;
        const double n = norm(r);
        if (n == 0.0) return c->center + Vec2{c->radius, 0.0};
        return c->center + r * (c->radius / n);
    }
    const auto& s = std::get<Segment>(o.shape);
    const Vec2 ab = s.b - s.a;
    const double t = std::clamp(dot(p - s.a, ab) / norm_sq(ab), 0.0, 1.0);
    return s.a + ab * t;
}

/// Signed clearance of p from the obstacle: negative inside a circle, >= 0 for segments.
inline double surface_distance(const Obstacle& o, const Vec2& p) {
    if (const auto* c = std::get_if<Circle>(&o.shape)) {
        return norm(p - c->center) - c->radius;
    }
    return norm(p - closest_boundary_point(o, p));
}

namespace detail {

/// Nearest t >= 0 with origin + t*dir on the obstacle boundary (dir is unit).
inline std::optional<double> ray_hit(const Obstacle& o, const Vec2& origin, const Vec2& dir) {
    if (const auto* c = std::get_if<Circle>(&o.shape)) {
        const Vec2 m = origin - c->center;
        const double b = dot(m, dir);
        const double cc = norm_sq(m) - c->radius * c->radius;
        const double disc = b * b - cc;
        if (disc < 0.0) return std::nullopt;
        const double sq = std::sqrt(disc);
        const double t0 = -b - sq;
        const double t1 = -b + sq;
        if (t0 >= 0.0) return t0;
        if (t1 >= 0.0) return t1;
        return std::nullopt;
    }
    const auto& s = std::get<Segment>(o.shape);
    const Vec2 e = s.b - s.a;
    const double denom = cross(dir, e);
    if (denom == 0.0) return std::nullopt;  // parallel; end points cover collinear cases
    const Vec2 w = s.a - origin;
    const double t = cross(w, e) / denom;
    const double u = cross(w, dir) / denom;
    if (t < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return t;
}

}  // namespace detail

/// Position and velocity of the pseudo-particle that stands in for an obstacle.
struct EquivalentPoint {
    Vec2 position;
    Vec2 velocity;
};

/**
 * Closest boundary point of `obstacle` that lies inside the viewer's vision cone.
 *
 * The distance to the boundary restricted to the cone attains its minimum either
 * at the unrestricted closest point, at a segment end point, or where a cone
 * edge ray crosses the boundary; the candidates are enumerated in that order.
 * Throws std::domain_error when the viewer is inside (or on) the obstacle.
 */
inline std::optional<EquivalentPoint> equivalent_point(const Vec2& viewer_pos,
                                                       const Vec2& viewer_heading,
                                                       const Obstacle& obstacle,
                                                       double kappa) {
    if (surface_distance(obstacle, viewer_pos) <= 0.0) {
        throw std::domain_error("equivalent_point: viewer is inside the obstacle");
    }
    double best = std::numeric_limits<double>::infinity();
    std::optional<Vec2> best_point;
    auto consider = [&](const Vec2& p, bool on_cone_edge) {
        if (!on_cone_edge && !in_vision_cone(p - viewer_pos, viewer_heading, kappa)) return;
        const double d = norm(p - viewer_pos);
        if (d < best) {
            best = d;
            best_point = p;
        }
    };

    consider(closest_boundary_point(obstacle, viewer_pos), false);
    if (const auto* s = std::get_if<Segment>(&obstacle.shape)) {
        consider(s->a, false);
        consider(s->b, false);
    }
    const double half_angle = std::acos(std::clamp(kappa, -1.0, 1.0));
    for (double sgn : {1.0, -1.0}) {
        const Vec2 dir = rotated(viewer_heading, sgn * half_angle);
        if (auto t = detail::ray_hit(obstacle, viewer_pos, dir)) {
            consider(viewer_pos + dir * *t, true);
        }
    }
    if (!best_point) return std::nullopt;
    return EquivalentPoint{*best_point, obstacle.velocity};
}

inline std::optional<EquivalentPoint> equivalent_point(const ParticleState& viewer,
                                                       const Obstacle& obstacle,
                                                       const ModelParams& params) {
    return equivalent_point(viewer.position, viewer.heading_vector(), obstacle, params.kappa);
}

enum class Membership { None, Co, Im, Fo };

/// Set membership of an assessed pair. Im implies Co.
inline Membership classify(const PairAssessment& a, const ModelParams& params) {
    if (!a.in_cone) return Membership::None;
    if (a.degenerate) return a.d < params.R_Fo ? Membership::Fo : Membership::None;
    if (a.tau >= 0.0) {
        if (!(a.D < params.R)) return Membership::None;
        if (a.tau_tilde >= 0.0 && a.D < params.R0_Im && a.d < params.R_Im) return Membership::Im;
        return Membership::Co;
    }
    return a.d < params.R_Fo ? Membership::Fo : Membership::None;
}

inline Membership classify(const ParticleState& viewer, const ParticleState& candidate,
                           const ModelParams& params) {
    const PairAssessment a =
        assess_pair(viewer.position, viewer.velocity(), viewer.heading_vector(),
                    candidate.position, candidate.velocity(), params);
    return classify(a, params);
}

/// Frozen kinematic view of all particles at one instant.
struct Snapshot {
    std::vector<Vec2> position;
    std::vector<Vec2> velocity;
    std::vector<Vec2> heading;  ///< unit heading, defined even at rest

    std::size_t size() const { return position.size(); }

    static Snapshot of(std::span<const ParticleState> states) {
        Snapshot s;
        s.position.reserve(states.size());
        s.velocity.reserve(states.size());
        s.heading.reserve(states.size());
        for (const auto& p : states) {
            const Vec2 h = p.heading_vector();
            s.position.push_back(p.position);
            s.velocity.push_back(h * p.speed);
            s.heading.push_back(h);
        }
        return s;
    }
};

enum class SourceKind { Particle, Obstacle };

struct Neighbor {
    SourceKind kind = SourceKind::Particle;
    std::size_t index = 0;  ///< particle index or obstacle index
    PairAssessment pair;
};

struct InteractionSets {
    std::vector<Neighbor> co;  ///< includes every member of im
    std::vector<Neighbor> im;
    std::vector<Neighbor> fo;

    bool empty() const { return co.empty() && im.empty() && fo.empty(); }
};

/**
 * Interaction sets of particle `viewer` against the candidate particles in
 * `pool` (which must not contain the viewer) and every obstacle.
 * Members keep pool order, obstacles follow particles.
 */
inline InteractionSets build_sets(std::size_t viewer, const Snapshot& snap,
                                  std::span<const std::size_t> pool,
                                  std::span<const Obstacle> obstacles,
                                  const ModelParams& params) {
    InteractionSets sets;
    const Vec2 x_i = snap.position[viewer];
    const Vec2 v_i = snap.velocity[viewer];
    const Vec2 e_i = snap.heading[viewer];

    for (std::size_t j : pool) {
        // Cone gating first; assess_pair would report in_cone = false anyway.
        if (!in_vision_cone(snap.position[j] - x_i, e_i, params.kappa)) continue;
        const PairAssessment a =
            assess_pair(x_i, v_i, e_i, snap.position[j], snap.velocity[j], params);
        switch (classify(a, params)) {
            case Membership::Im:
                sets.im.push_back({SourceKind::Particle, j, a});
                sets.co.push_back({SourceKind::Particle, j, a});
                break;
            case Membership::Co:
                sets.co.push_back({SourceKind::Particle, j, a});
                break;
            case Membership::Fo:
                sets.fo.push_back({SourceKind::Particle, j, a});
                break;
            case Membership::None:
                break;
        }
    }

    for (std::size_t k = 0; k < obstacles.size(); ++k) {
        const auto eq = equivalent_point(x_i, e_i, obstacles[k], params.kappa);
        if (!eq) continue;
        PairAssessment a = assess_pair(x_i, v_i, e_i, eq->position, eq->velocity, params);
        // The equivalent point lies in the cone by construction; cone-edge
        // points may miss the numeric test by rounding.
        a.in_cone = true;
        const Membership m = classify(a, params);
        if (m == Membership::Im) {
            sets.im.push_back({SourceKind::Obstacle, k, a});
            sets.co.push_back({SourceKind::Obstacle, k, a});
        } else if (m == Membership::Co) {
            sets.co.push_back({SourceKind::Obstacle, k, a});
        }
    }
    return sets;
}

}  // namespace crowdsim
