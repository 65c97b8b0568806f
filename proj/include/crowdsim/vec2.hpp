#pragma once
/**
 * @file vec2.hpp
 * @brief Plain 2D vector used for positions, velocities and forces.
 *
 * The scalar cross product follows the planar convention
 * u x v = u.x * v.y - u.y * v.x (z-component of the 3D product).
 */

#include <cmath>

namespace crowdsim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
constexpr double norm_sq(const Vec2& v) { return dot(v, v); }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }

/// Counterclockwise quarter turn, (x, y) -> (-y, x).
constexpr Vec2 rotate90(const Vec2& v) { return {-v.y, v.x}; }

inline Vec2 rotated(const Vec2& v, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline Vec2 unit_from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

inline bool is_finite(const Vec2& v) { return std::isfinite(v.x) && std::isfinite(v.y); }

}  // namespace crowdsim
