#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "cgks/basis.hpp"
#include "cgks/mesh.hpp"
#include "cgks/reconstruction.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cgks;

namespace {

struct Term {
    int i, j, k;
    double c;
};

// Dense little polynomial in physical coordinates.
struct Poly {
    std::vector<Term> terms;

    double value(const Vec3& x) const {
        double s = 0.0;
        for (const Term& t : terms)
            s += t.c * std::pow(x.x, t.i) * std::pow(x.y, t.j) * std::pow(x.z, t.k);
        return s;
    }
    double deriv(int axis, const Vec3& x) const {
        double s = 0.0;
        for (const Term& t : terms) {
            int e[3] = {t.i, t.j, t.k};
            if (e[axis] == 0) continue;
            const double f = e[axis];
            e[axis] -= 1;
            s += t.c * f * std::pow(x.x, e[0]) * std::pow(x.y, e[1]) * std::pow(x.z, e[2]);
        }
        return s;
    }
};

Poly random_poly(int degree, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Poly p;
    for (int i = 0; i <= degree; ++i)
        for (int j = 0; i + j <= degree; ++j)
            for (int k = 0; i + j + k <= degree; ++k) p.terms.push_back({i, j, k, u(rng)});
    return p;
}

constexpr double kVarScale[5] = {1.0, 0.7, -0.4, 0.2, 1.3};

// Fills the 19-cell stencil of `center` with exact data for the scaled
// polynomial field: quadrature averages, average gradients, and endpoint line
// differences.
struct StencilData {
    std::array<CellDOF, 19> dof{};
    std::array<const CellDOF*, 19> ptr{};

    void fill(const StructuredMesh& mesh, const Index3& center, const Poly& f) {
        for (int s = 0; s < 19; ++s) {
            Index3 c = center;
            for (int a = 0; a < 3; ++a) c[a] += kStencilOffsets[s][a];
            const int id = mesh.cell_id(c);
            const Vec3 base = mesh.cell_base_node(id);
            const Vec3 ext{mesh.period(0) / mesh.n(0), mesh.period(1) / mesh.n(1),
                           mesh.period(2) / mesh.n(2)};
            const auto corners = oracle::box_corners(base, base + ext);
            const double avg = oracle::box_average(corners, [&](const Vec3& x) { return f.value(x); });
            std::array<double, 3> gavg;
            for (int a = 0; a < 3; ++a)
                gavg[a] =
                    oracle::box_average(corners, [&](const Vec3& x) { return f.deriv(a, x); });
            std::array<double, 12> lines;
            for (int axis = 0; axis < 3; ++axis) {
                const auto lo = mesh.cell_face(c, axis, 0);
                const auto hi = mesh.cell_face(c, axis, 1);
                for (int g = 0; g < 4; ++g) {
                    const Vec3 p1 = mesh.face_gp(axis, lo.fid, g) + lo.shift;
                    const Vec3 p2 = mesh.face_gp(axis, hi.fid, g) + hi.shift;
                    lines[axis * 4 + g] = (f.value(p2) - f.value(p1)) / norm(p2 - p1);
                }
            }
            for (int v = 0; v < 5; ++v) {
                dof[s].q[v] = kVarScale[v] * avg;
                for (int a = 0; a < 3; ++a) dof[s].grad[a][v] = kVarScale[v] * gavg[a];
                for (int m = 0; m < 12; ++m) dof[s].line[m][v] = kVarScale[v] * lines[m];
            }
            ptr[s] = &dof[s];
        }
    }
};

std::array<Vec3, 24> face_gauss_points(const StructuredMesh& mesh, const Index3& center) {
    std::array<Vec3, 24> pts;
    for (int axis = 0; axis < 3; ++axis)
        for (int side = 0; side < 2; ++side) {
            const auto cf = mesh.cell_face(center, axis, side);
            for (int g = 0; g < 4; ++g)
                pts[(axis * 2 + side) * 4 + g] = mesh.face_gp(axis, cf.fid, g) + cf.shift;
        }
    return pts;
}

}  // namespace

TEST_CASE("basis functions have zero cell average") {
    const QuarticBasis& b = quartic_basis();
    const auto unit = oracle::box_corners({0, 0, 0}, {1, 1, 1});
    for (int n = 0; n < QuarticBasis::count; ++n) {
        const double avg = oracle::box_average(unit, [&](const Vec3& xi) {
            std::array<double, 34> v;
            b.eval(xi, v);
            return v[n];
        });
        CHECK(std::fabs(avg) < 1e-14);
    }
}

TEST_CASE("basis enumeration and slot lookup agree") {
    const QuarticBasis& b = quartic_basis();
    int prev_total = 0;
    for (int n = 0; n < QuarticBasis::count; ++n) {
        const auto& e = b.exponents(n);
        const int total = e[0] + e[1] + e[2];
        CHECK(total >= prev_total);
        prev_total = total;
        CHECK(b.slot(e[0], e[1], e[2]) == n);
    }
    CHECK(b.slot(0, 0, 0) == -1);
    CHECK(b.slot(5, 0, 0) == -1);
    CHECK(b.exponents(0) == std::array<int, 3>{1, 0, 0});
    CHECK(b.exponents(1) == std::array<int, 3>{0, 1, 0});
    CHECK(b.exponents(2) == std::array<int, 3>{0, 0, 1});
}

TEST_CASE("basis gradients match the power rule") {
    const QuarticBasis& b = quartic_basis();
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Vec3 xi{u(rng), u(rng), u(rng)};
        std::array<double, 34> val;
        std::array<Vec3, 34> grad;
        b.eval_grad(xi, val, grad);
        for (int n = 0; n < 34; ++n)
            for (int a = 0; a < 3; ++a) {
                std::array<int, 3> l{};
                l[a] = 1;
                const double want = oracle::monomial_derivative(b.exponents(n), l, xi);
                CHECK(grad[n][a] == doctest::Approx(want).epsilon(1e-13));
            }
    }
}

TEST_CASE("monomial averages match quadrature") {
    const QuarticBasis& b = quartic_basis();
    const std::array<std::array<int, 3>, 4> offs = {{{0, 0, 0}, {1, 0, 0}, {-1, 1, 0}, {0, -1, 1}}};
    for (int n = 0; n < 34; ++n)
        for (const auto& off : offs) {
            const Vec3 lo{static_cast<double>(off[0]), static_cast<double>(off[1]),
                          static_cast<double>(off[2])};
            const auto corners = oracle::box_corners(lo, lo + Vec3{1, 1, 1});
            const auto& e = b.exponents(n);
            // monomial_derivative with l = 0 is the plain scaled monomial.
            const double want = oracle::box_average(corners, [&](const Vec3& xi) {
                return oracle::monomial_derivative(e, {0, 0, 0}, xi);
            });
            const double got = monomial_average(e, off);
            CHECK(got == doctest::Approx(want).epsilon(1e-13));
        }
}

TEST_CASE("quartic reconstruction reproduces degree-4 data at face gauss points") {
    for (const double scale : {1.0, 0.5}) {
        const double len = 5.0 * scale;
        const auto mesh = build_cartesian_mesh({5, 5, 5}, {0, 0, 0}, {len, len, len},
                                               {false, false, false});
        const Index3 center{2, 2, 2};
        const int cid = mesh.cell_id(center);
        const CellGeometry& geom = mesh.cell_geometry(cid);
        const Vec3 base = mesh.cell_base_node(cid);

        std::mt19937_64 rng(2024);
        const Poly f = random_poly(4, rng);
        StencilData data;
        data.fill(mesh, center, f);

        CellPolynomials rec;
        reconstruct_cell(reconstruction_operator(), geom, data.ptr, rec);

        BlendedCell lin;
        blend_linear(rec, lin);

        BasisTable bt;
        Vec5 val;
        std::array<Vec5, 3> gref, gphys;
        for (const Vec3& x : face_gauss_points(mesh, center)) {
            const Vec3 xi = geom.J0inv * (x - base);
            make_basis_table(xi, bt);
            evaluate(lin, bt, val, gref);
            gradient_to_physical(geom.J0inv, gref, gphys);
            for (int v = 0; v < 5; ++v) {
                CHECK(std::fabs(val[v] - kVarScale[v] * f.value(x)) < 1e-11);
                for (int a = 0; a < 3; ++a)
                    CHECK(std::fabs(gphys[a][v] - kVarScale[v] * f.deriv(a, x)) < 1e-10);
            }
        }
    }
}

TEST_CASE("nonlinear blend is transparent for well-resolved data") {
    // A smooth global field sampled at a realistic cell size: the indicator
    // must leave the quartic untouched to round-off levels.
    const double h = 0.05;
    const auto mesh = build_cartesian_mesh({5, 5, 5}, {0, 0, 0}, {5 * h, 5 * h, 5 * h},
                                           {false, false, false});
    const Index3 center{2, 2, 2};
    const int cid = mesh.cell_id(center);
    const CellGeometry& geom = mesh.cell_geometry(cid);
    const Vec3 base = mesh.cell_base_node(cid);

    Poly f;
    // Taylor coefficients of a smooth O(1) function about the stencil center.
    {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(0.5, 1.5);
        for (int i = 0; i <= 4; ++i)
            for (int j = 0; i + j <= 4; ++j)
                for (int k = 0; i + j + k <= 4; ++k) f.terms.push_back({i, j, k, u(rng)});
    }
    StencilData data;
    data.fill(mesh, center, f);

    CellPolynomials rec;
    reconstruct_cell(reconstruction_operator(), geom, data.ptr, rec);
    BlendedCell lin, non;
    blend_linear(rec, lin);
    std::array<GenoState, 5> states;
    blend_nonlinear(reconstruction_operator(), GenoParams{}, rec, non, &states);
    for (int v = 0; v < 5; ++v) CHECK(std::fabs(states[v].chi - 1.0) < 1e-7);

    BasisTable bt;
    Vec5 vl, vn;
    for (const Vec3& x : face_gauss_points(mesh, center)) {
        const Vec3 xi = geom.J0inv * (x - base);
        make_basis_table(xi, bt);
        evaluate_value(lin, bt, vl);
        evaluate_value(non, bt, vn);
        for (int v = 0; v < 5; ++v) CHECK(std::fabs(vn[v] - vl[v]) < 1e-8);
    }
}

TEST_CASE("every sub-polynomial reproduces linear data") {
    const auto mesh =
        build_cartesian_mesh({5, 5, 5}, {0, 0, 0}, {5, 5, 5}, {false, false, false});
    const Index3 center{2, 2, 2};
    const int cid = mesh.cell_id(center);
    const CellGeometry& geom = mesh.cell_geometry(cid);
    const Vec3 base = mesh.cell_base_node(cid);

    Poly f;
    f.terms = {{0, 0, 0, 0.8}, {1, 0, 0, 0.3}, {0, 1, 0, -1.1}, {0, 0, 1, 0.45}};
    StencilData data;
    data.fill(mesh, center, f);

    CellPolynomials rec;
    reconstruct_cell(reconstruction_operator(), geom, data.ptr, rec);

    BasisTable bt;
    for (const Vec3& x : face_gauss_points(mesh, center)) {
        const Vec3 xi = geom.J0inv * (x - base);
        make_basis_table(xi, bt);
        for (int m = 0; m < 6; ++m)
            for (int v = 0; v < 5; ++v) {
                double pm = rec.q0[v];
                for (int l = 0; l < 3; ++l) pm += rec.b[m][l][v] * bt.val[l];
                CHECK(std::fabs(pm - kVarScale[v] * f.value(x)) < 1e-12);
            }
        // The nonlinear blend is a convex combination, hence also exact.
        BlendedCell non;
        blend_nonlinear(reconstruction_operator(), GenoParams{}, rec, non);
        Vec5 val;
        evaluate_value(non, bt, val);
        for (int v = 0; v < 5; ++v) CHECK(std::fabs(val[v] - kVarScale[v] * f.value(x)) < 1e-12);
    }
}

TEST_CASE("strict average constraints hold for random data") {
    const auto mesh =
        build_cartesian_mesh({5, 5, 5}, {0, 0, 0}, {5, 5, 5}, {false, false, false});
    const Index3 center{2, 2, 2};
    const int cid = mesh.cell_id(center);
    const CellGeometry& geom = mesh.cell_geometry(cid);

    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    StencilData data;
    for (int s = 0; s < 19; ++s) {
        for (int v = 0; v < 5; ++v) {
            data.dof[s].q[v] = u(rng);
            for (int a = 0; a < 3; ++a) data.dof[s].grad[a][v] = u(rng);
            for (int m = 0; m < 12; ++m) data.dof[s].line[m][v] = u(rng);
        }
        data.ptr[s] = &data.dof[s];
    }

    CellPolynomials rec;
    reconstruct_cell(reconstruction_operator(), geom, data.ptr, rec);
    BlendedCell lin;
    blend_linear(rec, lin);

    BasisTable bt;
    auto poly_at = [&](const Vec3& xi, int v) {
        Vec5 val;
        make_basis_table(xi, bt);
        evaluate_value(lin, bt, val);
        return val[v];
    };

    // Target cell and the six face neighbors, in reference coordinates.
    for (int s = 0; s < 7; ++s) {
        const Vec3 lo{static_cast<double>(kStencilOffsets[s][0]),
                      static_cast<double>(kStencilOffsets[s][1]),
                      static_cast<double>(kStencilOffsets[s][2])};
        const auto corners = oracle::box_corners(lo, lo + Vec3{1, 1, 1});
        for (int v = 0; v < 5; ++v) {
            const double avg =
                oracle::box_average(corners, [&](const Vec3& xi) { return poly_at(xi, v); });
            CHECK(std::fabs(avg - data.dof[s].q[v]) < 1e-12);
        }
    }

    // Sub-stencil polynomials: the face-neighbor average is strict as well.
    for (int m = 0; m < 6; ++m) {
        const int s = 1 + m;
        const Vec3 lo{static_cast<double>(kStencilOffsets[s][0]),
                      static_cast<double>(kStencilOffsets[s][1]),
                      static_cast<double>(kStencilOffsets[s][2])};
        const auto corners = oracle::box_corners(lo, lo + Vec3{1, 1, 1});
        for (int v = 0; v < 5; ++v) {
            const double avg = oracle::box_average(corners, [&](const Vec3& xi) {
                make_basis_table(xi, bt);
                double pm = rec.q0[v];
                for (int l = 0; l < 3; ++l) pm += rec.b[m][l][v] * bt.val[l];
                return pm;
            });
            CHECK(std::fabs(avg - data.dof[s].q[v]) < 1e-12);
        }
    }
}

TEST_CASE("smoothness quadratic forms match direct quadrature") {
    const ReconstructionOperator& op = reconstruction_operator();
    const QuarticBasis& b = quartic_basis();
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    std::array<double, 34> a;
    for (double& c : a) c = u(rng);

    auto quad_is = [&](int lo, int hi) {
        double total = 0.0;
        for (int lx = 0; lx <= 4; ++lx)
            for (int ly = 0; ly + lx <= 4; ++ly)
                for (int lz = 0; lz + ly + lx <= 4; ++lz) {
                    const int tot = lx + ly + lz;
                    if (tot < lo || tot > hi) continue;
                    const std::array<int, 3> l{lx, ly, lz};
                    const auto unit = oracle::box_corners({0, 0, 0}, {1, 1, 1});
                    total += oracle::box_average(unit, [&](const Vec3& xi) {
                        double d = 0.0;
                        for (int n = 0; n < 34; ++n)
                            d += a[n] * oracle::monomial_derivative(b.exponents(n), l, xi);
                        return d * d;
                    });
                }
        return total;
    };

    auto form = [&](const std::array<double, 34 * 34>& S) {
        double s = 0.0;
        for (int r = 0; r < 34; ++r)
            for (int c = 0; c < 34; ++c) s += a[r] * S[r * 34 + c] * a[c];
        return s;
    };

    CHECK(form(op.smooth_full) == doctest::Approx(quad_is(false)).epsilon(1e-12));
    CHECK(form(op.smooth_first) == doctest::Approx(quad_is(true)).epsilon(1e-12));
}

TEST_CASE("geno path function stays at one for smooth data") {
    const auto mesh =
        build_cartesian_mesh({5, 5, 5}, {0, 0, 0}, {5, 5, 5}, {false, false, false});
    const Index3 center{2, 2, 2};
    const int cid = mesh.cell_id(center);
    const CellGeometry& geom = mesh.cell_geometry(cid);

    SUBCASE("constant field") {
        StencilData data;
        for (int s = 0; s < 19; ++s) {
            for (int v = 0; v < 5; ++v) data.dof[s].q[v] = 1.0 + 0.1 * v;
            data.ptr[s] = &data.dof[s];
        }
        CellPolynomials rec;
        reconstruct_cell(reconstruction_operator(), geom, data.ptr, rec);
        for (int v = 0; v < 5; ++v) {
            const GenoState st = geno_state(reconstruction_operator(), GenoParams{}, rec, v);
            CHECK(st.chi == doctest::Approx(1.0).epsilon(1e-12));
            for (int m = 0; m < 6; ++m)
                CHECK(st.omega[m] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
        }
    }

    SUBCASE("linear field") {
        Poly f;
        f.terms = {{0, 0, 0, 1.2}, {1, 0, 0, 0.4}, {0, 1, 0, -0.7}, {0, 0, 1, 0.9}};
        StencilData data;
        data.fill(mesh, center, f);
        CellPolynomials rec;
        reconstruct_cell(reconstruction_operator(), geom, data.ptr, rec);
        for (int v = 0; v < 5; ++v) {
            const GenoState st = geno_state(reconstruction_operator(), GenoParams{}, rec, v);
            CHECK(std::fabs(st.chi - 1.0) < 1e-8);
        }
    }
}

TEST_CASE("geno detects a step") {
    const auto mesh =
        build_cartesian_mesh({5, 5, 5}, {0, 0, 0}, {5, 5, 5}, {false, false, false});
    const Index3 center{2, 2, 2};
    const int cid = mesh.cell_id(center);
    const CellGeometry& geom = mesh.cell_geometry(cid);

    // Unit step across the target cell's mid plane x = 2.5.
    auto step = [](const Vec3& x) { return x.x < 2.5 ? 0.0 : 1.0; };
    StencilData data;
    for (int s = 0; s < 19; ++s) {
        Index3 c = center;
        for (int a = 0; a < 3; ++a) c[a] += kStencilOffsets[s][a];
        const int id = mesh.cell_id(c);
        const Vec3 base = mesh.cell_base_node(id);
        const auto corners = oracle::box_corners(base, base + Vec3{1, 1, 1});
        const double avg = oracle::box_average(corners, step);
        std::array<double, 3> gavg{};
        // Divergence-theorem average gradient of the step over the cell.
        gavg[0] = (kStencilOffsets[s][0] == 0) ? 1.0 : 0.0;
        std::array<double, 12> lines{};
        for (int axis = 0; axis < 3; ++axis) {
            const auto lo = mesh.cell_face(c, axis, 0);
            const auto hi = mesh.cell_face(c, axis, 1);
            for (int g = 0; g < 4; ++g) {
                const Vec3 p1 = mesh.face_gp(axis, lo.fid, g) + lo.shift;
                const Vec3 p2 = mesh.face_gp(axis, hi.fid, g) + hi.shift;
                lines[axis * 4 + g] = (step(p2) - step(p1)) / norm(p2 - p1);
            }
        }
        for (int v = 0; v < 5; ++v) {
            data.dof[s].q[v] = avg;
            for (int a = 0; a < 3; ++a) data.dof[s].grad[a][v] = gavg[a];
            for (int m = 0; m < 12; ++m) data.dof[s].line[m][v] = lines[m];
        }
        data.ptr[s] = &data.dof[s];
    }

    CellPolynomials rec;
    reconstruct_cell(reconstruction_operator(), geom, data.ptr, rec);
    const GenoState st = geno_state(reconstruction_operator(), GenoParams{}, rec, 0);
    CHECK(st.chi < 0.5);
    double dev = 0.0;
    for (int m = 0; m < 6; ++m) dev = std::max(dev, std::fabs(st.omega[m] - 1.0 / 6.0));
    CHECK(dev > 0.1);
}

TEST_CASE("geno weights are a partition of unity for random data") {
    const auto mesh =
        build_cartesian_mesh({5, 5, 5}, {0, 0, 0}, {5, 5, 5}, {false, false, false});
    const Index3 center{2, 2, 2};
    const CellGeometry& geom = mesh.cell_geometry(mesh.cell_id(center));

    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        StencilData data;
        for (int s = 0; s < 19; ++s) {
            for (int v = 0; v < 5; ++v) {
                data.dof[s].q[v] = u(rng);
                for (int a = 0; a < 3; ++a) data.dof[s].grad[a][v] = u(rng);
                for (int m = 0; m < 12; ++m) data.dof[s].line[m][v] = u(rng);
            }
            data.ptr[s] = &data.dof[s];
        }
        CellPolynomials rec;
        reconstruct_cell(reconstruction_operator(), geom, data.ptr, rec);
        for (int v = 0; v < 5; ++v) {
            const GenoState st = geno_state(reconstruction_operator(), GenoParams{}, rec, v);
            CHECK(st.chi >= 0.0);
            CHECK(st.chi <= 1.0);
            double sum = 0.0;
            for (int m = 0; m < 6; ++m) {
                CHECK(st.omega[m] >= 0.0);
                CHECK(st.omega[m] <= 1.0);
                sum += st.omega[m];
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("operator conditioning is tame") {
    const ReconstructionOperator& op = reconstruction_operator();
    CHECK(op.cond_strict > 1.0);
    CHECK(op.cond_strict < 1e3);
    CHECK(op.cond_lsq > 1.0);
    CHECK(op.cond_lsq < 1e4);
}
