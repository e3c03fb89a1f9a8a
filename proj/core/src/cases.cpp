#include "cgks/cases.hpp"

#include <cmath>

#include "cgks/quadrature.hpp"

namespace cgks {

namespace {

const double kPi = std::acos(-1.0);

std::array<Vec3, 8> cell_corners(const StructuredMesh& m, int id) {
    const Index3 c = m.cell_index(id);
    std::array<Vec3, 8> out;
    for (int mm = 0; mm < 8; ++mm)
        out[mm] = m.node(c.i + (mm & 1), c.j + ((mm >> 1) & 1), c.k + ((mm >> 2) & 1));
    return out;
}

Vec5 cell_average(const std::array<Vec3, 8>& corners, const GasModel& gas,
                  const PrimitiveField& field) {
    double vol = 0.0;
    Vec5 sum{};
    for (int a = 0; a < GL::n5; ++a)
        for (int b = 0; b < GL::n5; ++b)
            for (int c = 0; c < GL::n5; ++c) {
                const Vec3 s{GL::x5[a] - 0.5, GL::x5[b] - 0.5, GL::x5[c] - 0.5};
                const double wd =
                    GL::w5[a] * GL::w5[b] * GL::w5[c] * det(trilinear_jacobian(corners, s));
                vol += wd;
                sum += wd * conservative(field(trilinear_point(corners, s)), gas);
            }
    return (1.0 / vol) * sum;
}

}  // namespace

StructuredMesh AdvectionCase::make_mesh(int n) const {
    return build_cartesian_mesh({n, n, n}, {0.0, 0.0, 0.0}, {2.0, 2.0, 2.0},
                                {true, true, true});
}

GasState AdvectionCase::exact(const Vec3& x, double t) const {
    GasState s;
    s.rho = 1.0 + 0.2 * std::sin(kPi * (x.x + x.y + x.z - 3.0 * t));
    s.vel = {1.0, 1.0, 1.0};
    s.lambda = 0.5 * s.rho;  // p = 1
    return s;
}

StructuredMesh VortexCase::make_mesh(int n, double distortion) const {
    return build_distorted_mesh(n, distortion, length);
}

GasState VortexCase::initial(const Vec3& x) const {
    const double xs = x.x / length, ys = x.y / length, zs = x.z / length;
    const double factor = 1.0 + gamma * mach * mach / 16.0 *
                                    (std::cos(2.0 * xs) + std::cos(2.0 * ys)) *
                                    (std::cos(2.0 * zs) + 2.0);
    GasState s;
    s.rho = rho0 * factor;
    s.vel = {u0 * std::sin(xs) * std::cos(ys) * std::cos(zs),
             -u0 * std::cos(xs) * std::sin(ys) * std::cos(zs), 0.0};
    s.lambda = s.rho / (2.0 * background_pressure() * factor);
    return s;
}

void initialize_state(Solver& solver, const PrimitiveField& field) {
    const StructuredMesh& m = solver.mesh();
    const GasModel gas = solver.config().gas;
    std::vector<CellDOF>& dofs = solver.state();
    const int ncells = m.cell_count();

    for (int c = 0; c < ncells; ++c) {
        const auto corners = cell_corners(m, c);
        const CellGeometry& geom = m.cell_geometry(c);
        CellDOF d;
        d.q = cell_average(corners, gas, field);

        std::array<Vec5, 3> grad{};
        for (int axis = 0; axis < 3; ++axis) {
            const auto pq = face_plane_axes(axis);
            for (int side = 0; side < 2; ++side) {
                const auto pick = [&](int i, int j) {
                    return corners[(side << axis) | (i << pq[0]) | (j << pq[1])];
                };
                const Vec3 f00 = pick(0, 0), f10 = pick(1, 0), f01 = pick(0, 1),
                           f11 = pick(1, 1);
                const double sgn = side == 0 ? -1.0 : 1.0;  // outward orientation
                for (int it = 0; it < GL::n5; ++it)
                    for (int is = 0; is < GL::n5; ++is) {
                        const double s = GL::x5[is], t = GL::x5[it];
                        const Vec3 x = (1.0 - s) * (1.0 - t) * f00 + s * (1.0 - t) * f10 +
                                       (1.0 - s) * t * f01 + s * t * f11;
                        const Vec3 xs = (1.0 - t) * (f10 - f00) + t * (f11 - f01);
                        const Vec3 xt = (1.0 - s) * (f01 - f00) + s * (f11 - f10);
                        const Vec3 raw = cross(xs, xt);  // scaled normal toward +axis
                        const double w = sgn * GL::w5[is] * GL::w5[it];
                        const Vec5 qv = conservative(field(x), gas);
                        grad[0] += (w * raw.x) * qv;
                        grad[1] += (w * raw.y) * qv;
                        grad[2] += (w * raw.z) * qv;
                    }
            }
        }
        const double inv_vol = 1.0 / geom.volume;
        for (int a = 0; a < 3; ++a) d.grad[a] = inv_vol * grad[a];

        const Index3 idx = m.cell_index(c);
        for (int axis = 0; axis < 3; ++axis) {
            const auto lo = m.cell_face(idx, axis, 0);
            const auto hi = m.cell_face(idx, axis, 1);
            for (int g = 0; g < 4; ++g) {
                const Vec3 p0 = m.face_gp(axis, lo.fid, g) + lo.shift;
                const Vec3 p1 = m.face_gp(axis, hi.fid, g) + hi.shift;
                d.line[axis * 4 + g] =
                    (1.0 / geom.line_length[axis * 4 + g]) *
                    (conservative(field(p1), gas) - conservative(field(p0), gas));
            }
        }
        dofs[c] = d;
    }
}

ErrorNorms density_error(const Solver& solver, const PrimitiveField& field) {
    const StructuredMesh& m = solver.mesh();
    const GasModel gas = solver.config().gas;
    const std::vector<CellDOF>& dofs = solver.state();
    double sum1 = 0.0, sum2 = 0.0;
    for (int c = 0; c < m.cell_count(); ++c) {
        const Vec5 exact = cell_average(cell_corners(m, c), gas, field);
        const double e = std::abs(dofs[c].q[0] - exact[0]);
        const double vol = m.cell_geometry(c).volume;
        sum1 += e * vol;
        sum2 += e * e * vol;
    }
    return {sum1, std::sqrt(sum2)};
}

}  // namespace cgks
