#include "cgks/kinetic_flux.hpp"

#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cgks {

FaceFrame face_frame(const Vec3& normal) {
    FaceFrame f;
    f.n = normalized(normal);
    int m = 0;
    double best = std::abs(f.n.x);
    if (std::abs(f.n.y) < best) {
        m = 1;
        best = std::abs(f.n.y);
    }
    if (std::abs(f.n.z) < best) m = 2;
    Vec3 e{};
    e[m] = 1.0;
    f.t1 = normalized(cross(f.n, e));
    f.t2 = cross(f.n, f.t1);
    return f;
}

Vec5 rotate_conservative(const FaceFrame& f, const Vec5& q) {
    const Vec3 mom{q[1], q[2], q[3]};
    return {q[0], dot(f.n, mom), dot(f.t1, mom), dot(f.t2, mom), q[4]};
}

Vec5 rotate_back_conservative(const FaceFrame& f, const Vec5& q) {
    const Vec3 mom = q[1] * f.n + q[2] * f.t1 + q[3] * f.t2;
    return {q[0], mom.x, mom.y, mom.z, q[4]};
}

MomentTable maxwellian_moments(const GasState& s, double internal_dof) {
    MomentTable t;
    t.rho = s.rho;
    const double lam = s.lambda;
    const double vel[3] = {s.vel.x, s.vel.y, s.vel.z};
    for (int c = 0; c < 3; ++c) {
        t.full[c][0] = 1.0;
        t.full[c][1] = vel[c];
        for (int k = 1; k <= 5; ++k)
            t.full[c][k + 1] = vel[c] * t.full[c][k] + 0.5 * k / lam * t.full[c][k - 1];
    }
    const double U = vel[0];
    const double sq = std::sqrt(lam);
    t.half_pos[0] = 0.5 * std::erfc(-sq * U);
    t.half_neg[0] = 0.5 * std::erfc(sq * U);
    const double gauss = 0.5 * std::exp(-lam * U * U) / std::sqrt(std::numbers::pi * lam);
    t.half_pos[1] = U * t.half_pos[0] + gauss;
    t.half_neg[1] = U * t.half_neg[0] - gauss;
    for (int k = 1; k <= 5; ++k) {
        t.half_pos[k + 1] = U * t.half_pos[k] + 0.5 * k / lam * t.half_pos[k - 1];
        t.half_neg[k + 1] = U * t.half_neg[k] + 0.5 * k / lam * t.half_neg[k - 1];
    }
    t.xi[0] = 1.0;
    t.xi[1] = 0.5 * internal_dof / lam;
    t.xi[2] = t.xi[1] * 0.5 * (internal_dof + 2.0) / lam;
    t.xi[3] = t.xi[2] * 0.5 * (internal_dof + 4.0) / lam;
    return t;
}

namespace {

Vec5 psi_from(const MomentTable& t, const double* mu, int i, int j, int k, int l) {
    assert(i + 2 <= 6 && j + 2 <= 6 && k + 2 <= 6 && l + 1 <= 3);
    const double* mv = t.full[1];
    const double* mw = t.full[2];
    const double vw = mv[j] * mw[k];
    Vec5 r;
    r[0] = mu[i] * vw * t.xi[l];
    r[1] = mu[i + 1] * vw * t.xi[l];
    r[2] = mu[i] * mv[j + 1] * mw[k] * t.xi[l];
    r[3] = mu[i] * mv[j] * mw[k + 1] * t.xi[l];
    r[4] = 0.5 * (mu[i + 2] * vw * t.xi[l] + mu[i] * mv[j + 2] * mw[k] * t.xi[l] +
                  mu[i] * mv[j] * mw[k + 2] * t.xi[l] + mu[i] * vw * t.xi[l + 1]);
    return t.rho * r;
}

const double* half_of(const MomentTable& t, int side) {
    return side > 0 ? t.half_pos : t.half_neg;
}

// rho <(a.psi) u^i v^j w^k xi^(2l) psi> over the space selected by mu.
Vec5 expansion_moment(const MomentTable& t, const double* mu, const Vec5& a, int i, int j, int k,
                      int l) {
    Vec5 r = a[0] * psi_from(t, mu, i, j, k, l) + a[1] * psi_from(t, mu, i + 1, j, k, l) +
             a[2] * psi_from(t, mu, i, j + 1, k, l) + a[3] * psi_from(t, mu, i, j, k + 1, l);
    const Vec5 quad = psi_from(t, mu, i + 2, j, k, l) + psi_from(t, mu, i, j + 2, k, l) +
                      psi_from(t, mu, i, j, k + 2, l) + psi_from(t, mu, i, j, k, l + 1);
    return r + (0.5 * a[4]) * quad;
}

}  // namespace

Vec5 psi_moment(const MomentTable& t, int i, int j, int k, int l) {
    return psi_from(t, t.full[0], i, j, k, l);
}

Vec5 psi_moment_half(const MomentTable& t, int side, int i, int j, int k, int l) {
    return psi_from(t, half_of(t, side), i, j, k, l);
}

Vec5 micro_slope(const GasState& s, double internal_dof, const Vec5& dq) {
    const double inv_rho = 1.0 / s.rho;
    const double U = s.vel.x, V = s.vel.y, W = s.vel.z, lam = s.lambda;
    const double b0 = dq[0] * inv_rho, b1 = dq[1] * inv_rho, b2 = dq[2] * inv_rho,
                 b3 = dq[3] * inv_rho, b4 = dq[4] * inv_rho;
    const double K = U * U + V * V + W * W + 0.5 * (internal_dof + 3.0) / lam;
    const double B1 = b1 - U * b0;
    const double B2 = b2 - V * b0;
    const double B3 = b3 - W * b0;
    const double B4 = 2.0 * b4 - K * b0;
    Vec5 a;
    a[4] = (4.0 * lam * lam / (internal_dof + 3.0)) * (B4 - 2.0 * (U * B1 + V * B2 + W * B3));
    a[1] = 2.0 * lam * B1 - U * a[4];
    a[2] = 2.0 * lam * B2 - V * a[4];
    a[3] = 2.0 * lam * B3 - W * a[4];
    a[0] = b0 - U * a[1] - V * a[2] - W * a[3] - 0.5 * a[4] * K;
    return a;
}

Vec5 time_slope(const GasState& s, double internal_dof, const MomentTable& t, const Vec5& ax,
                const Vec5& ay, const Vec5& az) {
    const Vec5 m = expansion_moment(t, t.full[0], ax, 1, 0, 0, 0) +
                   expansion_moment(t, t.full[0], ay, 0, 1, 0, 0) +
                   expansion_moment(t, t.full[0], az, 0, 0, 1, 0);
    return micro_slope(s, internal_dof, -1.0 * m);
}

double collision_time(double p_l, double p_r, double p_face, double dt, double mu,
                      CollisionMode mode) {
    if (mode == CollisionMode::off) return 0.0;
    if (!(p_l > 0.0) || !(p_r > 0.0) || !(p_face > 0.0))
        throw std::invalid_argument("collision_time needs positive pressures");
    const double jump = 5.0 * std::abs(p_l - p_r) / (p_l + p_r) * dt;
    if (mode == CollisionMode::inviscid) return 0.05 * dt + jump;
    return mu / p_face + jump;
}

TimeIntegrals time_integrals(double delta, double tau) {
    TimeIntegrals I;
    if (tau <= 0.0) {
        I.q0 = delta;
        I.q2 = 0.5 * delta * delta;
        return I;
    }
    const double s = delta / tau;
    double b0, b1, b2, b3, b4;
    if (s < 1e-3) {
        const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s, s6 = s5 * s;
        b0 = 0.5 * s2 - s3 / 6.0 + s4 / 24.0 - s5 / 120.0;
        b1 = -s3 / 6.0 + s4 / 12.0 - s5 / 40.0 + s6 / 180.0;
        b2 = s3 / 6.0 - s4 / 24.0 + s5 / 120.0 - s6 / 720.0;
        b3 = s - 0.5 * s2 + s3 / 6.0 - s4 / 24.0 + s5 / 120.0 - s6 / 720.0;
        b4 = s - s3 / 6.0 + s4 / 12.0 - s5 / 40.0 + s6 / 180.0;
    } else {
        const double E = std::exp(-s);
        b0 = s - 1.0 + E;
        b1 = 2.0 - s - (2.0 + s) * E;
        b2 = 0.5 * s * s - s + 1.0 - E;
        b3 = 1.0 - E;
        b4 = 2.0 - (2.0 + s) * E;
    }
    I.q0 = tau * b0;
    I.q1 = tau * tau * b1;
    I.q2 = tau * tau * b2;
    I.q3 = tau * b3;
    I.q4 = -tau * tau * b4;
    I.q5 = -tau * tau * b3;
    return I;
}

namespace {

struct RotatedSide {
    Vec5 q{};
    std::array<Vec5, 3> dq{};
};

RotatedSide rotate_side(const FaceFrame& fr, const SideInput& in, const GasModel& gas,
                        bool& invalid) {
    RotatedSide r;
    r.q = rotate_conservative(fr, in.q);
    if (!primitive(r.q, gas).valid()) {
        r.q = rotate_conservative(fr, in.fallback_q);
        invalid = true;
        return r;
    }
    const Vec5 dn = fr.n.x * in.grad[0] + fr.n.y * in.grad[1] + fr.n.z * in.grad[2];
    const Vec5 dt1 = fr.t1.x * in.grad[0] + fr.t1.y * in.grad[1] + fr.t1.z * in.grad[2];
    const Vec5 dt2 = fr.t2.x * in.grad[0] + fr.t2.y * in.grad[1] + fr.t2.z * in.grad[2];
    r.dq[0] = rotate_conservative(fr, dn);
    r.dq[1] = rotate_conservative(fr, dt1);
    r.dq[2] = rotate_conservative(fr, dt2);
    return r;
}

void prandtl_fix(double prandtl, const Vec5& qbar, Vec5& fbar) {
    const double inv_m = 1.0 / qbar[0];
    const double U = qbar[1] * inv_m, V = qbar[2] * inv_m, W = qbar[3] * inv_m;
    const double K = 0.5 * (U * U + V * V + W * W);
    const double heat = fbar[4] - U * fbar[1] - V * fbar[2] - W * fbar[3] + K * fbar[0] -
                        U * (qbar[4] - K * qbar[0]);
    fbar[4] += (1.0 / prandtl - 1.0) * heat;
}

}  // namespace

FluxBundle interface_flux(const FluxSetup& setup, const Vec3& normal, const SideInput& left,
                          const SideInput& right) {
    const FaceFrame fr = face_frame(normal);
    const GasModel& gas = setup.gas;
    const double N = gas.internal_dof();
    const double dt = setup.dt;
    FluxBundle out;

    bool bad = false;
    const RotatedSide L = rotate_side(fr, left, gas, bad);
    const RotatedSide R = rotate_side(fr, right, gas, bad);
    const GasState wl = primitive(L.q, gas);
    const GasState wr = primitive(R.q, gas);
    const MomentTable tl = maxwellian_moments(wl, N);
    const MomentTable tr = maxwellian_moments(wr, N);

    const Vec5 q0 = psi_moment_half(tl, +1, 0, 0, 0, 0) + psi_moment_half(tr, -1, 0, 0, 0, 0);
    const GasState w0 = primitive(q0, gas);
    if (!w0.valid()) bad = true;

    if (bad) {
        // First-order kinetic flux vector splitting from the (replaced) side
        // states; time-constant, free-transport interface model.
        out.fallback = true;
        const Vec5 fk =
            psi_moment_half(tl, +1, 1, 0, 0, 0) + psi_moment_half(tr, -1, 1, 0, 0, 0);
        out.flux_n = rotate_back_conservative(fr, fk);
        out.q_n = rotate_back_conservative(fr, q0);
        out.q_left0 = rotate_back_conservative(fr, L.q);
        out.q_right0 = rotate_back_conservative(fr, R.q);
        return out;
    }

    const double tau =
        collision_time(wl.pressure(), wr.pressure(), w0.pressure(), dt, gas.mu, setup.mode);
    out.tau = tau;
    const MomentTable t0 = maxwellian_moments(w0, N);

    const Vec5 dqe0 = 0.5 * (L.dq[0] + R.dq[0]);
    const Vec5 dqe1 = 0.5 * (L.dq[1] + R.dq[1]);
    const Vec5 dqe2 = 0.5 * (L.dq[2] + R.dq[2]);
    const Vec5 eax = micro_slope(w0, N, dqe0);
    const Vec5 eay = micro_slope(w0, N, dqe1);
    const Vec5 eaz = micro_slope(w0, N, dqe2);
    // Full-space moments of the equilibrium transport term (a.u) g0; the
    // compatibility condition makes the time term's moments its negation.
    const Vec5 me = expansion_moment(t0, t0.full[0], eax, 1, 0, 0, 0) +
                    expansion_moment(t0, t0.full[0], eay, 0, 1, 0, 0) +
                    expansion_moment(t0, t0.full[0], eaz, 0, 0, 1, 0);
    const Vec5 ea_t = micro_slope(w0, N, -1.0 * me);

    Vec5 lax{}, lay{}, laz{}, la_t{}, rax{}, ray{}, raz{}, ra_t{};
    if (tau > 0.0) {
        lax = micro_slope(wl, N, L.dq[0]);
        lay = micro_slope(wl, N, L.dq[1]);
        laz = micro_slope(wl, N, L.dq[2]);
        la_t = time_slope(wl, N, tl, lax, lay, laz);
        rax = micro_slope(wr, N, R.dq[0]);
        ray = micro_slope(wr, N, R.dq[1]);
        raz = micro_slope(wr, N, R.dq[2]);
        ra_t = time_slope(wr, N, tr, rax, ray, raz);
    }

    auto assemble = [&](double delta, Vec5& fbar, Vec5& qbar) {
        const TimeIntegrals I = time_integrals(delta, tau);
        fbar = I.q0 * psi_moment(t0, 1, 0, 0, 0) +
               I.q1 * (expansion_moment(t0, t0.full[0], eax, 2, 0, 0, 0) +
                       expansion_moment(t0, t0.full[0], eay, 1, 1, 0, 0) +
                       expansion_moment(t0, t0.full[0], eaz, 1, 0, 1, 0)) +
               I.q2 * expansion_moment(t0, t0.full[0], ea_t, 1, 0, 0, 0);
        qbar = I.q0 * psi_moment(t0, 0, 0, 0, 0) +
               I.q1 * (expansion_moment(t0, t0.full[0], eax, 1, 0, 0, 0) +
                       expansion_moment(t0, t0.full[0], eay, 0, 1, 0, 0) +
                       expansion_moment(t0, t0.full[0], eaz, 0, 0, 1, 0)) +
               I.q2 * expansion_moment(t0, t0.full[0], ea_t, 0, 0, 0, 0);
        if (tau > 0.0) {
            const double* hp = half_of(tl, +1);
            const double* hn = half_of(tr, -1);
            fbar += I.q3 * (psi_moment_half(tl, +1, 1, 0, 0, 0) +
                            psi_moment_half(tr, -1, 1, 0, 0, 0)) +
                    I.q4 * (expansion_moment(tl, hp, lax, 2, 0, 0, 0) +
                            expansion_moment(tl, hp, lay, 1, 1, 0, 0) +
                            expansion_moment(tl, hp, laz, 1, 0, 1, 0) +
                            expansion_moment(tr, hn, rax, 2, 0, 0, 0) +
                            expansion_moment(tr, hn, ray, 1, 1, 0, 0) +
                            expansion_moment(tr, hn, raz, 1, 0, 1, 0)) +
                    I.q5 * (expansion_moment(tl, hp, la_t, 1, 0, 0, 0) +
                            expansion_moment(tr, hn, ra_t, 1, 0, 0, 0));
            qbar += I.q3 * (psi_moment_half(tl, +1, 0, 0, 0, 0) +
                            psi_moment_half(tr, -1, 0, 0, 0, 0)) +
                    I.q4 * (expansion_moment(tl, hp, lax, 1, 0, 0, 0) +
                            expansion_moment(tl, hp, lay, 0, 1, 0, 0) +
                            expansion_moment(tl, hp, laz, 0, 0, 1, 0) +
                            expansion_moment(tr, hn, rax, 1, 0, 0, 0) +
                            expansion_moment(tr, hn, ray, 0, 1, 0, 0) +
                            expansion_moment(tr, hn, raz, 0, 0, 1, 0)) +
                    I.q5 * (expansion_moment(tl, hp, la_t, 0, 0, 0, 0) +
                            expansion_moment(tr, hn, ra_t, 0, 0, 0, 0));
        }
        if (setup.mode == CollisionMode::viscous && gas.prandtl != 1.0)
            prandtl_fix(gas.prandtl, qbar, fbar);
    };

    Vec5 f_half, q_half, f_full, q_full;
    assemble(0.5 * dt, f_half, q_half);
    assemble(dt, f_full, q_full);

    const double inv_dt = 1.0 / dt;
    const Vec5 fn = inv_dt * (4.0 * f_half - f_full);
    const Vec5 ft = (4.0 * inv_dt * inv_dt) * (f_full - 2.0 * f_half);
    const Vec5 qn = inv_dt * (4.0 * q_half - q_full);
    const Vec5 qt = (4.0 * inv_dt * inv_dt) * (q_full - 2.0 * q_half);

    // One-sided interface evolution: both sides relax toward the equilibrium
    // track Q^e(t) = Q0 + t <A psi>g0 with weight 1 - exp(-dt/tau).
    const double beta = tau > 0.0 ? std::exp(-dt / tau) : 0.0;
    const Vec5 de = -1.0 * me;
    Vec5 left0 = (1.0 - beta) * q0 + beta * L.q;
    Vec5 right0 = (1.0 - beta) * q0 + beta * R.q;
    Vec5 left_t = (1.0 - beta) * de;
    Vec5 right_t = (1.0 - beta) * de;
    if (beta > 0.0) {
        const Vec5 ml = expansion_moment(tl, tl.full[0], lax, 1, 0, 0, 0) +
                        expansion_moment(tl, tl.full[0], lay, 0, 1, 0, 0) +
                        expansion_moment(tl, tl.full[0], laz, 0, 0, 1, 0);
        const Vec5 mr = expansion_moment(tr, tr.full[0], rax, 1, 0, 0, 0) +
                        expansion_moment(tr, tr.full[0], ray, 0, 1, 0, 0) +
                        expansion_moment(tr, tr.full[0], raz, 0, 0, 1, 0);
        left_t += (-beta) * ml;
        right_t += (-beta) * mr;
    }

    out.flux_n = rotate_back_conservative(fr, fn);
    out.flux_t = rotate_back_conservative(fr, ft);
    out.q_n = rotate_back_conservative(fr, qn);
    out.q_t = rotate_back_conservative(fr, qt);
    out.q_left0 = rotate_back_conservative(fr, left0);
    out.q_left_t = rotate_back_conservative(fr, left_t);
    out.q_right0 = rotate_back_conservative(fr, right0);
    out.q_right_t = rotate_back_conservative(fr, right_t);
    return out;
}

}  // namespace cgks
