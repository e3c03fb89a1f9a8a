#pragma once

#include <array>

#include "cgks/gas.hpp"
#include "cgks/geometry.hpp"

namespace cgks {

// Orthonormal face frame: rows (n, t1, t2) rotate physical vectors into the
// normal frame. Tangents are a deterministic function of the normal.
struct FaceFrame {
    Vec3 n, t1, t2;
};
FaceFrame face_frame(const Vec3& normal);

Vec5 rotate_conservative(const FaceFrame& f, const Vec5& q);
Vec5 rotate_back_conservative(const FaceFrame& f, const Vec5& q);

// One-dimensional Maxwellian velocity moments per component (full space and,
// for the normal component, the two half spaces), plus internal-energy
// moments. All moments are normalized by density.
struct MomentTable {
    double rho = 0.0;
    double full[3][7]{};   // <u^k>, <v^k>, <w^k>, k = 0..6
    double half_pos[7]{};  // normal component, u > 0
    double half_neg[7]{};  // normal component, u < 0
    double xi[4]{};        // <xi^(2l)>, l = 0..3
};

MomentTable maxwellian_moments(const GasState& s, double internal_dof);

// rho * <u^i v^j w^k xi^(2l) psi>, full velocity space.
Vec5 psi_moment(const MomentTable& t, int i, int j, int k, int l);
// Same with the normal component restricted to a half space (side = +1 / -1).
Vec5 psi_moment_half(const MomentTable& t, int side, int i, int j, int k, int l);

// Micro-slope expansion a = (a0..a4) on psi solving  rho<(a.psi) psi> = dq.
Vec5 micro_slope(const GasState& s, double internal_dof, const Vec5& dq);

// Time coefficient A from the compatibility condition
//   integral (ax u + ay v + az w + A) g psi = 0.
Vec5 time_slope(const GasState& s, double internal_dof, const MomentTable& t, const Vec5& ax,
                const Vec5& ay, const Vec5& az);

enum class CollisionMode { off, inviscid, viscous };

// off: 0. inviscid: 0.05 dt + 5 |pl-pr|/(pl+pr) dt. viscous: mu/p + jump term.
double collision_time(double p_l, double p_r, double p_face, double dt, double mu,
                      CollisionMode mode);

// Analytic integrals over [0, delta] of the five time factors of the
// second-order integral solution, with E(t) = exp(-t/tau):
//   q0: 1-E          (equilibrium g0)
//   q1: (t+tau)E-tau (equilibrium slope terms)
//   q2: t-tau+tau E  (equilibrium time term)
//   q3: E            (initial side states)
//   q4: -(tau+t)E    (initial slope terms)
//   q5: -tau E       (initial time terms)
struct TimeIntegrals {
    double q0 = 0, q1 = 0, q2 = 0, q3 = 0, q4 = 0, q5 = 0;
};
TimeIntegrals time_integrals(double delta, double tau);

struct SideInput {
    Vec5 q{};                        // conservative value at the Gauss point
    std::array<Vec5, 3> grad{};      // physical-frame gradients
    Vec5 fallback_q{};               // cell average, used when q is invalid
};

struct FluxBundle {
    Vec5 flux_n{}, flux_t{};         // F^n and its time derivative, physical frame
    Vec5 q_left0{}, q_left_t{};      // one-sided interface value models Q_s(0) + t dQ_s
    Vec5 q_right0{}, q_right_t{};
    Vec5 q_n{}, q_t{};               // single-valued interface extraction
    double tau = 0.0;
    bool fallback = false;           // kinetic-splitting fallback was used
};

struct FluxSetup {
    GasModel gas;
    CollisionMode mode = CollisionMode::inviscid;
    double dt = 0.0;                 // extraction window
};

// Full time-accurate interface kernel at one face Gauss point.
FluxBundle interface_flux(const FluxSetup& setup, const Vec3& normal, const SideInput& left,
                          const SideInput& right);

}  // namespace cgks
