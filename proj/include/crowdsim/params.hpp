#pragma once
/**
 * @file params.hpp
 * @brief Model constants of the vision-cone collision-avoidance model.
 *
 * Defaults are the calibrated values used for every built-in scenario:
 * kappa = 0.5 (cone half-angle 60 deg), particle radius 0.5 m, safe radius 3 m,
 * steering gain 6*pi, braking gain e, following gain pi, friction 1/s.
 */

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace crowdsim {

/// Raised when user-supplied input (parameters, scenario, CLI) is invalid.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ModelParams {
    double kappa = 0.5;    ///< vision cone threshold, cone = {z : <z,e> >= kappa |z|}
    double R0 = 0.5;       ///< particle radius [m]
    double R = 3.0;        ///< safe radius for the collision set [m]
    double R0_Im = 1.0;    ///< minimal-distance threshold of the imminent set [m]
    double R_Im = 3.0;     ///< range of the imminent set [m]
    double R_Fo = 3.0;     ///< range of the following set [m]
    double C0 = 6.0 * std::numbers::pi;
    double C1 = 2.0;       ///< [s]
    double C2 = std::numbers::e;
    double C3 = 1.0;
    double C4 = std::numbers::pi;
    double C5 = 1.0;
    double delta0 = 0.01;
    double delta1 = 0.1;
    double beta = 0.01;
    double sigma = 1.0;    ///< friction [1/s]
    double e_c = 0.8;      ///< restitution coefficient

    double eps_relvel = 1e-9;      ///< relative speeds below this are degenerate [m/s]
    double eps_speed = 1e-6;       ///< heading is frozen below this speed [m/s]
    double eps_target = 1e-6;      ///< potential gradient is zero inside this ball [m]
    double waypoint_radius = 1.0;  ///< waypoint counts as reached inside this radius [m]

    bool operator==(const ModelParams&) const = default;

    /// Throws ValidationError naming the first violated constraint.
    void validate() const {
        auto require = [](bool ok, const char* what) {
            if (!ok) throw ValidationError(std::string("invalid model parameter: ") + what);
        };
        const double all[] = {kappa, R0, R, R0_Im, R_Im, R_Fo, C0, C1, C2, C3, C4, C5,
                              delta0, delta1, beta, sigma, e_c, eps_relvel, eps_speed,
                              eps_target, waypoint_radius};
        for (double v : all) require(std::isfinite(v), "non-finite value");
        require(kappa >= -1.0 && kappa <= 1.0, "kappa must lie in [-1, 1]");
        require(R0 > 0.0, "R0 > 0");
        require(R >= 2.0 * R0, "R >= 2 R0");
        require(R0_Im > 0.0 && R0_Im < R, "R0_Im in (0, R)");
        require(R_Im > 2.0 * R0, "R_Im > 2 R0");
        require(R_Fo > R0, "R_Fo > R0");
        // Zero gains are accepted so individual forces can be switched off
        // (e.g. C2 = C4 = 0 removes braking and following).
        require(C0 >= 0.0 && C2 >= 0.0 && C4 >= 0.0, "gains C0, C2, C4 >= 0");
        require(C1 > 0.0 && C3 > 0.0 && C5 > 0.0, "scales C1, C3, C5 > 0");
        require(delta0 > 0.0 && delta1 >= 0.0, "delta0 > 0, delta1 >= 0");
        require(beta > 0.0, "beta > 0");
        require(sigma >= 0.0, "sigma >= 0");
        require(e_c >= 0.0 && e_c <= 1.0, "e_c in [0, 1]");
        require(eps_relvel > 0.0 && eps_speed > 0.0 && eps_target > 0.0, "epsilons > 0");
        require(waypoint_radius > 0.0, "waypoint_radius > 0");
    }
};

}  // namespace crowdsim
