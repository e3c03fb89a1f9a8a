#pragma once

#include <functional>

#include "cgks/evolution.hpp"
#include "cgks/gas.hpp"
#include "cgks/mesh.hpp"

namespace cgks {

using PrimitiveField = std::function<GasState(const Vec3&)>;

// Density perturbation advected diagonally at unit speed on [0, 2]^3, fully
// periodic; run collisionless. The exact solution is known for all times.
struct AdvectionCase {
    double final_time = 2.0;

    StructuredMesh make_mesh(int n) const;
    GasState exact(const Vec3& x, double t) const;
    GasModel gas() const { return {1.4, 1.0, 0.0}; }
};

// Taylor-Green vortex on [-pi L, pi L]^3, periodic, constant viscosity.
struct VortexCase {
    double mach = 0.1;
    double reynolds = 1600.0;
    double prandtl = 0.7;
    double gamma = 1.4;
    double rho0 = 1.0, u0 = 1.0, length = 1.0;

    double viscosity() const { return rho0 * u0 * length / reynolds; }
    double background_pressure() const { return rho0 * u0 * u0 / (gamma * mach * mach); }
    GasModel gas() const { return {gamma, prandtl, viscosity()}; }

    // distortion 0 gives the uniform Cartesian mesh
    StructuredMesh make_mesh(int n, double distortion) const;
    GasState initial(const Vec3& x) const;
};

// Fills the solver state from a pointwise field: cell averages by 5^3 Gauss
// quadrature, average gradients by the divergence theorem with 5^2 points per
// face, and line-difference unknowns from exact endpoint values.
void initialize_state(Solver& solver, const PrimitiveField& field);

struct ErrorNorms {
    double l1 = 0.0;
    double l2 = 0.0;
};

// Volume-integral norms of the density cell-average error against the exact
// averages of `field`: sum |e| V and sqrt(sum e^2 V).
ErrorNorms density_error(const Solver& solver, const PrimitiveField& field);

}  // namespace cgks
