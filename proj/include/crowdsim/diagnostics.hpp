#pragma once
/**
 * @file diagnostics.hpp
 * @brief Scalar health measures of a particle configuration.
 *
 * The density L2 norm smooths each particle into a Gaussian of width a and
 * returns || (1/N) sum_i G_a(x - x_i) ||_2, in closed form
 *
 *     sqrt( 1/(2 pi a^2 N^2) * sum_{i,j} exp(-|x_i - x_j|^2 / (2 a^2)) ),
 *
 * diagonal terms included. With a = 0.5 / sqrt(2 ln 10) (99% of each Gaussian
 * inside its own disc of radius 0.5 m) the cross terms only become
 * significant when discs overlap.
 */

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "crowdsim/neighbors.hpp"
#include "crowdsim/state.hpp"
#include "crowdsim/vec2.hpp"

namespace crowdsim {

inline const double kDefaultGaussianWidth = 0.5 / std::sqrt(2.0 * std::numbers::ln10);

/// Pairs beyond this many widths are dropped by the grid evaluation (term < 1.6e-8).
inline constexpr double kGaussianCutoffWidths = 6.0;

inline double kinetic_energy(std::span<const ParticleState> states) {
    double e = 0.0;
    for (const auto& s : states) e += 0.5 * s.speed * s.speed;
    return e;
}

/// Direct O(N^2) evaluation over all ordered pairs (i, j), i == j included.
inline double l2_norm_direct(std::span<const Vec2> positions, double a = kDefaultGaussianWidth) {
    const std::size_t n = positions.size();
    if (n == 0) return 0.0;
    const double inv_2a2 = 1.0 / (2.0 * a * a);
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) off += std::exp(-norm_sq(positions[i] - positions[j]) * inv_2a2);
    const double total = static_cast<double>(n) + 2.0 * off;
    const double nn = static_cast<double>(n);
    return std::sqrt(total / (2.0 * std::numbers::pi * a * a * nn * nn));
}

/// Cell-list evaluation, ignoring pairs farther apart than 6a. O(N) at bounded density.
inline double l2_norm_grid(std::span<const Vec2> positions, double a = kDefaultGaussianWidth) {
    const std::size_t n = positions.size();
    if (n == 0) return 0.0;
    const double cutoff = kGaussianCutoffWidths * a;
    const double cut2 = cutoff * cutoff;
    const double inv_2a2 = 1.0 / (2.0 * a * a);
    const CellGrid grid = build_grid(positions, cutoff);
    std::vector<std::size_t> near;
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        near.clear();
        grid.gather_moore(grid.cell_of_particle[i], near);
        for (std::size_t j : near) {
            if (j <= i) continue;
            const double r2 = norm_sq(positions[i] - positions[j]);
            if (r2 < cut2) off += std::exp(-r2 * inv_2a2);
        }
    }
    const double total = static_cast<double>(n) + 2.0 * off;
    const double nn = static_cast<double>(n);
    return std::sqrt(total / (2.0 * std::numbers::pi * a * a * nn * nn));
}

/// Unordered pairs with centre distance strictly below 2 R0.
inline std::size_t overlap_count(std::span<const Vec2> positions, double R0) {
    const double lim = 2.0 * R0;
    const CellGrid grid = build_grid(positions, lim);
    std::vector<std::size_t> near;
    std::size_t count = 0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        near.clear();
        grid.gather_moore(grid.cell_of_particle[i], near);
        for (std::size_t j : near)
            if (j > i && norm_sq(positions[i] - positions[j]) < lim * lim) ++count;
    }
    return count;
}

/// One row of the metrics stream.
struct StepDiagnostics {
    double t = 0.0;
    std::size_t collision_count = 0;
    double energy_loss_step = 0.0;
    double energy_loss_cum = 0.0;
    std::size_t overlap_pairs = 0;
    double l2_norm = 0.0;
};

}  // namespace crowdsim
