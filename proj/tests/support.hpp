#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "crowdsim/crowdsim.hpp"

namespace testing_support {

using crowdsim::CounterRng;
using crowdsim::ParticleState;
using crowdsim::Vec2;

inline Vec2 random_vec(CounterRng& rng, double lo, double hi) { return {rng.uniform(lo, hi), rng.uniform(lo, hi)}; }

/// n non-overlapping random particles in a box of the given width, random speeds and targets.
inline std::vector<ParticleState> random_scene(CounterRng& rng, std::size_t n, double width, double min_gap = 1.0) {
    std::vector<ParticleState> out;
    std::size_t guard = 0;
    while (out.size() < n && guard++ < 100000) {
        const Vec2 p = random_vec(rng, 0.0, width);
        bool ok = true;
        for (const auto& q : out)
            if (crowdsim::norm(q.position - p) < min_gap) ok = false;
        if (!ok) continue;
        ParticleState s;
        s.id = static_cast<int>(out.size());
        s.position = p;
        s.speed = rng.uniform(0.0, 1.5);
        s.heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
        s.waypoints = {random_vec(rng, 0.0, width)};
        out.push_back(s);
    }
    return out;
}

/// Brute-force minimum of |z + t u| over t in [0, t_max] on a uniform grid.
struct GridMin {
    double t = 0.0;
    double dist = 0.0;
};

inline GridMin brute_min_distance(Vec2 z, Vec2 u, double t_max, double h) {
    GridMin best{0.0, crowdsim::norm(z)};
    const auto steps = static_cast<std::int64_t>(std::llround(t_max / h));
    for (std::int64_t k = 1; k <= steps; ++k) {
        const double t = static_cast<double>(k) * h;
        const double d = crowdsim::norm(z + u * t);
        if (d < best.dist) best = {t, d};
    }
    return best;
}

}  // namespace testing_support
