#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "crowdsim/geometry.hpp"
#include "crowdsim/vec2.hpp"

namespace crowdsim {

/// One agent. Velocity is stored in polar form (speed >= 0, heading in (-pi, pi]).
struct ParticleState {
    int id = 0;
    Vec2 position;
    double speed = 0.0;
    double heading = 0.0;
    std::vector<Vec2> waypoints;
    bool cyclic = false;
    std::size_t waypoint_cursor = 0;
    std::optional<double> arrived_at;

    Vec2 velocity() const { return unit_from_angle(heading) * speed; }
    Vec2 heading_vector() const { return unit_from_angle(heading); }
    LocalFrame frame() const { return LocalFrame::from_heading(heading); }

    bool has_target() const { return !waypoints.empty(); }
    const Vec2& target() const { return waypoints[waypoint_cursor]; }

    bool operator==(const ParticleState&) const = default;
};

}  // namespace crowdsim
