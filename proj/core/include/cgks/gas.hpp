#pragma once

#include <cmath>
#include <stdexcept>

#include "cgks/geometry.hpp"

namespace cgks {

// Calorically perfect gas. The kinetic model carries N internal degrees of
// freedom per molecule so that gamma = (N + 5) / (N + 3) in 3D.
struct GasModel {
    double gamma = 1.4;
    double prandtl = 1.0;
    double mu = 0.0;  // dynamic viscosity, constant

    double internal_dof() const { return (5.0 - 3.0 * gamma) / (gamma - 1.0); }
};

// Primitive description of a Maxwellian: density, macroscopic velocity and
// lambda = rho / (2 p) = m / (2 k T).
struct GasState {
    double rho = 1.0;
    Vec3 vel{};
    double lambda = 1.0;

    double pressure() const { return rho / (2.0 * lambda); }

    bool valid() const {
        return std::isfinite(rho) && rho > 0.0 && std::isfinite(lambda) && lambda > 0.0 &&
               std::isfinite(vel.x) && std::isfinite(vel.y) && std::isfinite(vel.z);
    }
};

inline Vec5 conservative(const GasState& s, const GasModel& gas) {
    const double ke = 0.5 * s.rho * dot(s.vel, s.vel);
    const double p = s.pressure();
    return {s.rho, s.rho * s.vel.x, s.rho * s.vel.y, s.rho * s.vel.z, p / (gas.gamma - 1.0) + ke};
}

// Returns a state with non-positive rho/lambda left as-is; callers decide how
// to handle invalid states (see GasState::valid).
inline GasState primitive(const Vec5& q, const GasModel& gas) {
    GasState s;
    s.rho = q[0];
    s.vel = {q[1] / q[0], q[2] / q[0], q[3] / q[0]};
    const double ke = 0.5 * (q[1] * q[1] + q[2] * q[2] + q[3] * q[3]) / q[0];
    const double p = (gas.gamma - 1.0) * (q[4] - ke);
    s.lambda = q[0] / (2.0 * p);
    return s;
}

inline double pressure_of(const Vec5& q, const GasModel& gas) {
    const double ke = 0.5 * (q[1] * q[1] + q[2] * q[2] + q[3] * q[3]) / q[0];
    return (gas.gamma - 1.0) * (q[4] - ke);
}

inline double sound_speed(const Vec5& q, const GasModel& gas) {
    return std::sqrt(gas.gamma * pressure_of(q, gas) / q[0]);
}

}  // namespace cgks
