#pragma once
/**
 * @file geometry.hpp
 * @brief Pairwise perception quantities between two constant-velocity particles.
 *
 * For a viewer i and a candidate j with relative position z = x_j - x_i and
 * relative velocity u = v_j - v_i:
 *
 *   tau       = -<z,u> / |u|^2                 time to the closest approach
 *   D         = |z x u| / |u|                  distance at the closest approach
 *   alpha     = signed CCW angle from the viewer heading to z, in (-pi, pi]
 *   alpha_dot = <u, e_alpha> / d = (k x u) / d with k = z / d
 *   tau_tilde = tau - sqrt(max(4 R0^2 - D^2, 0)) / |u|    time until the discs touch
 *
 * All functions are pure.
 */

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "crowdsim/params.hpp"
#include "crowdsim/vec2.hpp"

namespace crowdsim {

/// Orthonormal frame attached to a heading: e_rho along it, e_phi its CCW normal.
struct LocalFrame {
    Vec2 e_rho{1.0, 0.0};
    Vec2 e_phi{0.0, 1.0};

    static LocalFrame from_heading(double theta) {
        const Vec2 e = unit_from_angle(theta);
        return {e, rotate90(e)};
    }
};

/// Maps any angle to (-pi, pi].
inline double wrap_angle(double a) {
    constexpr double pi = std::numbers::pi;
    if (a > -pi && a <= pi) return a;
    a = std::remainder(a, 2.0 * pi);
    if (a <= -pi) a += 2.0 * pi;
    return a;
}

/// Signed angle that rotates v onto z counterclockwise, in (-pi, pi].
inline double bearing_angle(const Vec2& z, const Vec2& v) {
    if (norm_sq(z) == 0.0 || norm_sq(v) == 0.0) {
        throw std::domain_error("bearing_angle: zero-length vector");
    }
    const double a = std::atan2(cross(v, z), dot(v, z));
    return a == -std::numbers::pi ? std::numbers::pi : a;
}

/// Cone membership <z,v> >= kappa |z||v|. A coincident point (z = 0) is never seen.
inline bool in_vision_cone(const Vec2& z, const Vec2& v, double kappa) {
    const double zz = norm_sq(z);
    if (zz == 0.0) return false;
    return dot(z, v) >= kappa * std::sqrt(zz * norm_sq(v));
}

struct PairAssessment {
    double d = 0.0;          ///< current distance [m]
    double tau = 0.0;        ///< time to interaction [s]; 0 when degenerate
    double D = 0.0;          ///< minimal distance [m]; equals d when degenerate
    double alpha = 0.0;      ///< bearing angle [rad]
    double alpha_dot = 0.0;  ///< bearing angle rate [rad/s]; 0 when degenerate
    double tau_tilde = 0.0;  ///< time to collide [s]; 0 when degenerate
    bool in_cone = false;
    bool degenerate = false;  ///< |v_j - v_i| < eps_relvel: no predicted interaction
};

/// Minimum distance used as the bearing-rate denominator for coincident centres.
inline constexpr double kMinPairDistance = 1e-9;

/**
 * Perception quantities of candidate j as seen by viewer i.
 *
 * `heading` is the viewer's unit heading; it is passed separately because a
 * viewer at rest still has a heading (its last direction of motion).
 */
inline PairAssessment assess_pair(const Vec2& x_i, const Vec2& v_i, const Vec2& heading,
                                  const Vec2& x_j, const Vec2& v_j, const ModelParams& params) {
    PairAssessment out;
    const Vec2 z = x_j - x_i;
    const Vec2 u = v_j - v_i;
    out.d = norm(z);
    out.in_cone = in_vision_cone(z, heading, params.kappa);
    out.alpha = out.d > 0.0 ? bearing_angle(z, heading) : 0.0;

    const double speed_rel = norm(u);
    if (speed_rel < params.eps_relvel) {
        out.degenerate = true;
        out.D = out.d;
        return out;
    }

    const double d_safe = std::max(out.d, kMinPairDistance);
    out.alpha_dot = cross(z, u) / (d_safe * d_safe);
    out.tau = -dot(z, u) / (speed_rel * speed_rel);
    out.D = std::abs(cross(z, u)) / speed_rel;
    const double contact = 4.0 * params.R0 * params.R0 - out.D * out.D;
    out.tau_tilde = out.tau - std::sqrt(std::max(contact, 0.0)) / speed_rel;
    return out;
}

/// Convenience overload taking the heading from a non-zero viewer velocity.
inline PairAssessment assess_pair(const Vec2& x_i, const Vec2& v_i, const Vec2& x_j,
                                  const Vec2& v_j, const ModelParams& params) {
    const double s = norm(v_i);
    if (s == 0.0) throw std::domain_error("assess_pair: viewer velocity has no direction");
    return assess_pair(x_i, v_i, v_i / s, x_j, v_j, params);
}

}  // namespace crowdsim
