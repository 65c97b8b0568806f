#pragma once
/**
 * @file scenario.hpp
 * @brief Scenario description, validation and the built-in experiments.
 */

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "crowdsim/dynamics.hpp"
#include "crowdsim/neighbors.hpp"
#include "crowdsim/params.hpp"
#include "crowdsim/perception.hpp"
#include "crowdsim/rng.hpp"
#include "crowdsim/state.hpp"

namespace crowdsim {

struct Scenario {
    std::string name;
    std::vector<ParticleState> particles;
    std::vector<Obstacle> obstacles;
    std::optional<Rect> domain;
    double duration = 15.0;
    ModelParams params;

    bool operator==(const Scenario&) const = default;

    /// Throws ValidationError with the offending particle indices.
    void validate() const {
        params.validate();
        if (!(duration > 0.0) || !std::isfinite(duration)) throw ValidationError("duration must be > 0");
        if (domain && !(domain->min.x < domain->max.x && domain->min.y < domain->max.y))
            throw ValidationError("domain must have min < max");
        for (std::size_t i = 0; i < particles.size(); ++i) {
            const auto& p = particles[i];
            const std::string tag = "particle " + std::to_string(i);
            if (!is_finite(p.position) || !std::isfinite(p.speed) || !std::isfinite(p.heading))
                throw ValidationError(tag + ": non-finite state");
            if (p.speed < 0.0) throw ValidationError(tag + ": negative speed");
            for (const auto& w : p.waypoints)
                if (!is_finite(w)) throw ValidationError(tag + ": non-finite waypoint");
            if (!p.waypoints.empty() && p.waypoint_cursor >= p.waypoints.size())
                throw ValidationError(tag + ": waypoint cursor out of range");
            if (domain) {
                const Rect& d = *domain;
                if (p.position.x < d.min.x || p.position.x > d.max.x || p.position.y < d.min.y ||
                    p.position.y > d.max.y)
                    throw ValidationError(tag + ": outside the domain");
            }
        }
        for (std::size_t k = 0; k < obstacles.size(); ++k) {
            try {
                obstacles[k].validate();
            } catch (const ValidationError& e) {
                throw ValidationError("obstacle " + std::to_string(k) + ": " + e.what());
            }
            for (std::size_t i = 0; i < particles.size(); ++i) {
                if (surface_distance(obstacles[k], particles[i].position) < params.R0)
                    throw ValidationError("particle " + std::to_string(i) + " overlaps obstacle " +
                                          std::to_string(k));
            }
        }
        if (particles.size() > 1) {
            std::vector<Vec2> pos;
            pos.reserve(particles.size());
            for (const auto& p : particles) pos.push_back(p.position);
            const double lim = 2.0 * params.R0;
            const CellGrid grid = build_grid(pos, lim);
            std::vector<std::size_t> near;
            for (std::size_t i = 0; i < pos.size(); ++i) {
                near.clear();
                grid.gather_moore(grid.cell_of_particle[i], near);
                std::sort(near.begin(), near.end());
                for (std::size_t j : near) {
                    if (j > i && norm_sq(pos[j] - pos[i]) < lim * lim)
                        throw ValidationError("particles " + std::to_string(i) + " and " + std::to_string(j) +
                                              " overlap initially (distance < 2 R0)");
                }
            }
        }
    }
};

namespace builtin {

inline ParticleState walker(int id, Vec2 pos, double speed, Vec2 goal) {
    ParticleState p;
    p.id = id;
    p.position = pos;
    p.speed = speed;
    p.heading = bearing_angle(goal - pos, Vec2{1.0, 0.0});
    p.waypoints = {goal};
    return p;
}

/// Four particles on a 10 m diameter circle, each heading for the opposite point at 1 m/s.
inline Scenario circle() {
    Scenario s;
    s.name = "Circle";
    s.duration = 15.0;
    const double r = 5.0;
    for (int k = 0; k < 4; ++k) {
        const double a = k * std::numbers::pi / 2.0;
        const Vec2 pos = unit_from_angle(a) * r;
        s.particles.push_back(walker(k, pos, 1.0, -pos));
    }
    return s;
}

/**
 * Twenty particles in four columns (2 m apart) of five (3 m apart) walking +y at
 * 0.7 m/s towards two circular obstacles of diameter 4 m and 8 m; goals 60 m
 * ahead. The obstacle centres are not published; they sit side by side across
 * the corridor, 15 m ahead of the front row, leaving a 2 m gap between them.
 */
inline Scenario obstacles() {
    Scenario s;
    s.name = "Obstacles";
    s.duration = 60.0;
    int id = 0;
    for (int row = 0; row < 5; ++row) {
        for (int col = 0; col < 4; ++col) {
            const Vec2 pos{-3.0 + 2.0 * col, -3.0 * row};
            s.particles.push_back(walker(id++, pos, 0.7, pos + Vec2{0.0, 60.0}));
        }
    }
    s.obstacles.push_back({Circle{{-4.0, 15.0}, 2.0}, {}});
    s.obstacles.push_back({Circle{{4.0, 15.0}, 4.0}, {}});
    return s;
}

/**
 * Two 5x5 groups (1 m across, 3 m deep) meeting where a horizontal and a
 * vertical 20 m lane cross at the origin. Both fronts start 22 m before the
 * crossing centre and walk 0.7 m/s towards goals 44 m ahead.
 */
inline Scenario crossing() {
    Scenario s;
    s.name = "Crossing";
    s.duration = 60.0;
    int id = 0;
    for (int line = 0; line < 5; ++line) {
        for (int row = 0; row < 5; ++row) {
            const Vec2 pos{-22.0 - 3.0 * line, -2.0 + 1.0 * row};
            s.particles.push_back(walker(id++, pos, 0.7, pos + Vec2{44.0, 0.0}));
        }
    }
    for (int line = 0; line < 5; ++line) {
        for (int row = 0; row < 5; ++row) {
            const Vec2 pos{-2.0 + 1.0 * row, -22.0 - 3.0 * line};
            s.particles.push_back(walker(id++, pos, 0.7, pos + Vec2{0.0, 44.0}));
        }
    }
    return s;
}

/**
 * Two facing groups of twelve (six abreast, two deep) swapping sides at 1 m/s.
 * The published spacings (0.8 m across, 2 m deep) are read as gaps between
 * disc surfaces, i.e. 1.8 m and 3.0 m between centres. The 6 m gap between
 * the two front lines is a free choice.
 */
inline Scenario group_swap() {
    Scenario s;
    s.name = "GroupSwap";
    s.duration = 20.0;
    const double across = 1.8;
    const double deep = 3.0;
    const double half_gap = 3.0;
    int id = 0;
    for (int side = 0; side < 2; ++side) {
        const double dir = side == 0 ? 1.0 : -1.0;  // group 0 walks +x
        for (int line = 0; line < 2; ++line) {
            for (int k = 0; k < 6; ++k) {
                const Vec2 pos{-dir * (half_gap + deep * line), (k - 2.5) * across};
                s.particles.push_back(walker(id++, pos, 1.0, Vec2{-pos.x, pos.y}));
            }
        }
    }
    return s;
}

/// Side length of the confined square at the benchmark density (N = 32 <-> D = 25 m).
inline double confined_width_for(std::size_t n) {
    return 25.0 * std::sqrt(static_cast<double>(n) / 32.0);
}

/**
 * n particles placed uniformly at random (no overlaps, >= R0 from the walls)
 * in a D x D box walled by four segments. Every particle loops
 * counterclockwise over the corners of the centred D/2 square, starting with
 * the next corner counterclockwise from its own polar angle; it starts at
 * rest, facing that corner.
 */
inline Scenario confined_square(std::size_t n, double D, std::uint64_t seed) {
    if (n == 0) throw ValidationError("ConfinedSquare needs n >= 1");
    if (!(D > 2.0) || !std::isfinite(D)) throw ValidationError("ConfinedSquare needs D > 2 m");
    Scenario s;
    s.name = "ConfinedSquare";
    s.duration = 15.0;
    s.domain = Rect{{0.0, 0.0}, {D, D}};
    const double R0 = s.params.R0;
    const Vec2 c{D / 2.0, D / 2.0};
    const double q = D / 4.0;
    const std::vector<Vec2> corners{c + Vec2{-q, -q}, c + Vec2{q, -q}, c + Vec2{q, q}, c + Vec2{-q, q}};

    CounterRng rng(seed, 0xC0FFEE);
    const double lim = 2.0 * R0;
    std::vector<Vec2> placed;
    CellGrid grid;
    grid.cell_size = lim;
    const std::uint64_t max_attempts = 1000 * static_cast<std::uint64_t>(n) + 10000;
    std::uint64_t attempts = 0;
    while (placed.size() < n) {
        if (++attempts > max_attempts) throw ValidationError("ConfinedSquare: density too high to place particles");
        const Vec2 p{rng.uniform(R0, D - R0), rng.uniform(R0, D - R0)};
        const CellKey k = grid.cell_of(p);
        std::vector<std::size_t> near;
        grid.gather_moore(k, near);
        bool ok = true;
        for (std::size_t j : near)
            if (norm_sq(placed[j] - p) < lim * lim) { ok = false; break; }
        if (!ok) continue;
        grid.occupancy[k].push_back(placed.size());
        placed.push_back(p);
    }

    for (std::size_t i = 0; i < n; ++i) {
        ParticleState p;
        p.id = static_cast<int>(i);
        p.position = placed[i];
        p.waypoints = corners;
        p.cyclic = true;
        const Vec2 rel = placed[i] - c;
        const double phi = norm_sq(rel) > 0.0 ? bearing_angle(rel, Vec2{1.0, 0.0}) : 0.0;
        // corners sit at -135, -45, 45, 135 degrees
        const double deg = phi * 180.0 / std::numbers::pi;
        std::size_t cursor = 0;
        if (deg < -135.0) cursor = 0;
        else if (deg < -45.0) cursor = 1;
        else if (deg < 45.0) cursor = 2;
        else if (deg < 135.0) cursor = 3;
        else cursor = 0;
        p.waypoint_cursor = cursor;
        const Vec2 to = corners[cursor] - p.position;
        p.heading = norm_sq(to) > 0.0 ? bearing_angle(to, Vec2{1.0, 0.0}) : 0.0;
        p.speed = 0.0;
        s.particles.push_back(std::move(p));
    }
    const Vec2 a{0.0, 0.0}, b{D, 0.0}, cc{D, D}, d{0.0, D};
    s.obstacles = {{Segment{a, b}, {}}, {Segment{b, cc}, {}}, {Segment{cc, d}, {}}, {Segment{d, a}, {}}};
    return s;
}

inline std::string normalize_name(std::string n) {
    std::string out;
    for (char ch : n)
        if (std::isalnum(static_cast<unsigned char>(ch))) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    return out;
}

inline const std::vector<std::string>& names() {
    static const std::vector<std::string> n{"Circle", "Obstacles", "Crossing", "GroupSwap", "ConfinedSquare"};
    return n;
}

}  // namespace builtin

/**
 * Built-in scenario by name (case and punctuation insensitive, so "Group-swap"
 * works). ConfinedSquare uses n (default 500), D (default from the benchmark
 * density) and the placement seed.
 */
inline Scenario builtin_scenario(const std::string& name, std::optional<std::size_t> n = std::nullopt,
                                 std::optional<double> D = std::nullopt, std::uint64_t seed = 0) {
    const std::string key = builtin::normalize_name(name);
    if (key == "circle") return builtin::circle();
    if (key == "obstacles") return builtin::obstacles();
    if (key == "crossing") return builtin::crossing();
    if (key == "groupswap") return builtin::group_swap();
    if (key == "confinedsquare") {
        const std::size_t count = n.value_or(500);
        return builtin::confined_square(count, D.value_or(builtin::confined_width_for(count)), seed);
    }
    throw ValidationError("unknown built-in scenario: " + name);
}

}  // namespace crowdsim
