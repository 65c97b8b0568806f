#pragma once
/**
 * @file forces.hpp
 * @brief Accelerations acting on one particle (unit mass, so force == acceleration).
 *
 *   F_Co = sum_j w_Co / (|Co| + beta) * |v| e_phi,  w_Co = -C0 cos(alpha) exp(-tau/C1) g(alpha_dot)
 *   F_Im = sum_j w_Im / (|Im| + beta) * (-v),       w_Im = C2 exp(-d tau_tilde / C3)
 *   F_Fo = sum_j w_Fo / (|Fo| + beta) * |v| e_phi,  w_Fo = C4 exp(-|alpha_dot| d^2 / C5) sin(2 alpha)
 *   F_Ex = (x_T - x)/|x_T - x| - sigma v
 *
 * g is a smoothed sign with a bias delta1 so that a perfectly constant bearing
 * (alpha_dot = 0) still produces a turn.
 */

#include <cmath>
#include <span>

#include "crowdsim/geometry.hpp"
#include "crowdsim/params.hpp"
#include "crowdsim/perception.hpp"
#include "crowdsim/vec2.hpp"

namespace crowdsim {

/// Kinematics of the particle a force acts on.
struct Kinematics {
    Vec2 position;
    double speed = 0.0;
    Vec2 heading{1.0, 0.0};  ///< unit
    Vec2 velocity() const { return heading * speed; }
};

inline double g_smooth(double x, double delta0, double delta1) {
    return 2.0 / (1.0 + std::exp(-x / delta0)) - 1.0 + delta1;
}

inline Vec2 collision_force(const Kinematics& viewer, std::span<const Neighbor> co,
                            const ModelParams& p) {
    if (co.empty()) return {};
    double sum = 0.0;
    for (const auto& n : co) {
        const auto& a = n.pair;
        sum += -p.C0 * std::cos(a.alpha) * std::exp(-a.tau / p.C1) *
               g_smooth(a.alpha_dot, p.delta0, p.delta1);
    }
    const double omega = sum / (static_cast<double>(co.size()) + p.beta);
    return rotate90(viewer.heading) * (omega * viewer.speed);
}

inline Vec2 imminent_force(const Kinematics& viewer, std::span<const Neighbor> im,
                           const ModelParams& p) {
    if (im.empty()) return {};
    double sum = 0.0;
    for (const auto& n : im) sum += p.C2 * std::exp(-n.pair.d * n.pair.tau_tilde / p.C3);
    const double omega = sum / (static_cast<double>(im.size()) + p.beta);
    return viewer.velocity() * (-omega);
}

inline Vec2 following_force(const Kinematics& viewer, std::span<const Neighbor> fo,
                            const ModelParams& p) {
    if (fo.empty()) return {};
    double sum = 0.0;
    for (const auto& n : fo) {
        const auto& a = n.pair;
        // Degenerate members carry alpha_dot = 0 (constant bearing).
        sum += p.C4 * std::exp(-std::abs(a.alpha_dot) * a.d * a.d / p.C5) * std::sin(2.0 * a.alpha);
    }
    const double omega = sum / (static_cast<double>(fo.size()) + p.beta);
    return rotate90(viewer.heading) * (omega * viewer.speed);
}

/// Attraction to the target with potential |x - x_T|, plus linear friction.
inline Vec2 exit_force(const Kinematics& viewer, const Vec2* target, const ModelParams& p) {
    Vec2 f = viewer.velocity() * (-p.sigma);
    if (target) {
        const Vec2 to = *target - viewer.position;
        const double dist = norm(to);
        if (dist >= p.eps_target) f += to / dist;
    }
    return f;
}

struct ForceBreakdown {
    Vec2 co, im, fo, ex;
    Vec2 total() const { return co + im + fo + ex; }
};

inline ForceBreakdown force_terms(const Kinematics& viewer, const InteractionSets& sets,
                                  const Vec2* target, const ModelParams& p) {
    return {collision_force(viewer, sets.co, p), imminent_force(viewer, sets.im, p),
            following_force(viewer, sets.fo, p), exit_force(viewer, target, p)};
}

inline Vec2 total_force(const Kinematics& viewer, const InteractionSets& sets,
                        const Vec2* target, const ModelParams& p) {
    return force_terms(viewer, sets, target, p).total();
}

}  // namespace crowdsim
