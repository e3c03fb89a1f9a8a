#include "cgks/reconstruction.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "cgks/quadrature.hpp"

namespace cgks {

namespace {

constexpr double kWeightGradient = 2.0;     // h1' for face-neighbor gradient rows
constexpr double kWeightDirectional = 1.0;  // h2' for edge-neighbor rows
constexpr double kWeightLine = 3.0;         // h3' for line-derivative rows

Vec3 unit_face_gp(int axis, int side, int g) {
    const auto pq = face_plane_axes(axis);
    Vec3 xi{};
    xi[axis] = side ? 1.0 : 0.0;
    xi[pq[0]] = GL::x2[g % 2];
    xi[pq[1]] = GL::x2[g / 2];
    return xi;
}

double avg_basis_derivative(const std::array<int, 3>& d, int comp,
                            const std::array<int, 3>& off) {
    if (d[comp] == 0) return 0.0;
    std::array<int, 3> dd = d;
    --dd[comp];
    return monomial_average(dd, off);
}

// Minimal-norm-free constrained least squares: exact E a = e, minimal
// ||A a - b||. Returns the pair of maps (a = ME e + MA b).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> constrained_map(const Eigen::MatrixXd& E,
                                                            const Eigen::MatrixXd& A,
                                                            double* cond_strict,
                                                            double* cond_lsq) {
    const int n = static_cast<int>(E.cols());
    const int me = static_cast<int>(E.rows());

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(E.transpose());
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd R = qr.matrixQR().topLeftCorner(me, me).triangularView<Eigen::Upper>();
    for (int i = 0; i < me; ++i)
        if (std::abs(R(i, i)) < 1e-12)
            throw std::runtime_error("reconstruction equality block is rank deficient");
    Eigen::MatrixXd N = Q.rightCols(n - me);
    Eigen::MatrixXd P = Q.leftCols(me) * R.transpose().inverse();

    Eigen::MatrixXd AN = A * N;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(AN);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) < 1e-10 * sv(0))
        throw std::runtime_error("reconstruction least-squares block is rank deficient");
    if (cond_lsq) *cond_lsq = sv(0) / sv(sv.size() - 1);
    if (cond_strict) {
        Eigen::JacobiSVD<Eigen::MatrixXd> esvd(E);
        const auto& es = esvd.singularValues();
        *cond_strict = es(0) / es(es.size() - 1);
    }

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(AN);
    Eigen::MatrixXd ANp = cod.pseudoInverse();
    Eigen::MatrixXd ME = P - N * (ANp * (A * P));
    Eigen::MatrixXd MA = N * ANp;
    return {ME, MA};
}

}  // namespace

ReconstructionOperator build_reconstruction_operator() {
    const auto& B = quartic_basis();
    constexpr int nb = ReconstructionOperator::unknowns;
    constexpr int nr = ReconstructionOperator::rhs_size;

    Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(nr, nb);
    std::array<double, nr> scale;
    scale.fill(1.0);

    for (int s = 0; s < 19; ++s)
        for (int n = 0; n < nb; ++n)
            rows(s, n) = monomial_average(B.exponents(n), kStencilOffsets[s]) - B.mean(n);

    for (int m = 0; m < 6; ++m) {
        const auto& off = kStencilOffsets[face_neighbor_slot(m / 2, m % 2)];
        for (int comp = 0; comp < 3; ++comp) {
            const int r = 19 + 3 * m + comp;
            scale[r] = kWeightGradient;
            for (int n = 0; n < nb; ++n)
                rows(r, n) = kWeightGradient * avg_basis_derivative(B.exponents(n), comp, off);
        }
    }

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int e = 0; e < 12; ++e) {
        const int group = e / 4;
        const auto& off = kStencilOffsets[edge_neighbor_slot(group, e % 4)];
        const int eaxis = edge_group_axis(group);
        const int pa = eaxis == 0 ? 1 : 0;
        const int pb = eaxis == 2 ? 1 : 2;
        const int r1 = 37 + 2 * e, r2 = r1 + 1;
        scale[r1] = scale[r2] = kWeightDirectional;
        for (int n = 0; n < nb; ++n) {
            const auto& d = B.exponents(n);
            rows(r1, n) = kWeightDirectional * avg_basis_derivative(d, eaxis, off);
            rows(r2, n) = kWeightDirectional * inv_sqrt2 *
                          (off[pa] * avg_basis_derivative(d, pa, off) +
                           off[pb] * avg_basis_derivative(d, pb, off));
        }
    }

    for (int axis = 0; axis < 3; ++axis)
        for (int g = 0; g < 4; ++g) {
            const int r = 61 + 4 * axis + g;
            scale[r] = kWeightLine;
            std::array<double, nb> lo, hi;
            B.eval(unit_face_gp(axis, 0, g), lo);
            B.eval(unit_face_gp(axis, 1, g), hi);
            for (int n = 0; n < nb; ++n) rows(r, n) = kWeightLine * (hi[n] - lo[n]);
        }

    // Strict block: the six face-neighbor averages (the target's own average
    // row is identically zero under the zero-mean basis).
    std::array<int, 6> strict_rows;
    for (int m = 0; m < 6; ++m) strict_rows[m] = 1 + m;
    std::vector<int> lsq_rows;
    for (int s = 7; s < 19; ++s) lsq_rows.push_back(s);
    for (int r = 19; r < nr; ++r) lsq_rows.push_back(r);

    Eigen::MatrixXd E(6, nb), A(static_cast<int>(lsq_rows.size()), nb);
    for (int i = 0; i < 6; ++i) E.row(i) = rows.row(strict_rows[i]);
    for (size_t j = 0; j < lsq_rows.size(); ++j) A.row(static_cast<int>(j)) = rows.row(lsq_rows[j]);

    ReconstructionOperator op;
    auto [ME, MA] = constrained_map(E, A, &op.cond_strict, &op.cond_lsq);

    for (int i = 0; i < nb; ++i) {
        for (int m = 0; m < 6; ++m) op.quartic[i * nr + strict_rows[m]] = ME(i, m);
        for (size_t j = 0; j < lsq_rows.size(); ++j)
            op.quartic[i * nr + lsq_rows[j]] = MA(i, static_cast<int>(j)) * scale[lsq_rows[j]];
    }

    // Six sub-stencil maps: strict average of the face neighbor plus the 8
    // line differences perpendicular to its axis.
    for (int m = 0; m < 6; ++m) {
        const int axis = m / 2;
        const auto& off = kStencilOffsets[face_neighbor_slot(axis, m % 2)];
        Eigen::MatrixXd Es(1, 3), As(8, 3);
        for (int c = 0; c < 3; ++c) Es(0, c) = off[c];
        As.setZero();
        int row = 0;
        for (int c = 0; c < 3; ++c) {
            if (c == axis) continue;
            for (int g = 0; g < 4; ++g, ++row) As(row, c) = kWeightLine;
        }
        auto [MEs, MAs] = constrained_map(Es, As, nullptr, nullptr);
        for (int i = 0; i < 3; ++i) {
            op.sub[m][i * 9 + 0] = MEs(i, 0);
            for (int j = 0; j < 8; ++j) op.sub[m][i * 9 + 1 + j] = MAs(i, j) * kWeightLine;
        }
    }

    // Smoothness quadratic forms: sum over derivative multi-indices 1<=|l|<=4
    // of the reference-cell integrals of D^l p_i * D^l p_j (h = 1).
    auto shift_valid = [](const std::array<int, 3>& d, const std::array<int, 3>& l,
                          std::array<int, 3>& out) {
        for (int a = 0; a < 3; ++a) {
            out[a] = d[a] - l[a];
            if (out[a] < 0) return false;
        }
        return true;
    };
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) {
            double full = 0.0, first = 0.0, tail = 0.0;
            for (int l = 0; l < nb; ++l) {
                const auto& le = B.exponents(l);
                const int order = le[0] + le[1] + le[2];
                std::array<int, 3> di, dj;
                if (!shift_valid(B.exponents(i), le, di)) continue;
                if (!shift_valid(B.exponents(j), le, dj)) continue;
                const double term = monomial_pair_integral(di, dj);
                full += term;
                if (order == 1) first += term;
                if (order >= 3) tail += term;
            }
            op.smooth_full[i * nb + j] = full;
            op.smooth_first[i * nb + j] = first;
            op.smooth_tail[i * nb + j] = tail;
        }
    return op;
}

const ReconstructionOperator& reconstruction_operator() {
    static const ReconstructionOperator op = build_reconstruction_operator();
    return op;
}

void reconstruct_cell(const ReconstructionOperator& op, const CellGeometry& geom,
                      const std::array<const CellDOF*, 19>& stencil, CellPolynomials& out) {
    constexpr int nr = ReconstructionOperator::rhs_size;
    double v[nr][5];

    Vec5 t0;
    for (int var = 0; var < 5; ++var) t0[var] = stencil[0]->q[var] / geom.C[0];
    out.q0 = t0;

    for (int s = 0; s < 19; ++s) {
        const double invc = 1.0 / geom.C[s];
        for (int var = 0; var < 5; ++var) v[s][var] = stencil[s]->q[var] * invc - t0[var];
    }

    // Reference-frame average gradients of the 18 neighbors: J0^T grad.
    double gref[18][3][5];
    for (int s = 1; s < 19; ++s) {
        const auto& g = stencil[s]->grad;
        for (int a = 0; a < 3; ++a)
            for (int var = 0; var < 5; ++var)
                gref[s - 1][a][var] = geom.J0(0, a) * g[0][var] + geom.J0(1, a) * g[1][var] +
                                      geom.J0(2, a) * g[2][var];
    }

    for (int m = 0; m < 6; ++m)
        for (int a = 0; a < 3; ++a)
            for (int var = 0; var < 5; ++var) v[19 + 3 * m + a][var] = gref[m][a][var];

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int e = 0; e < 12; ++e) {
        const int group = e / 4;
        const int slot = edge_neighbor_slot(group, e % 4);
        const auto& off = kStencilOffsets[slot];
        const int eaxis = edge_group_axis(group);
        const int pa = eaxis == 0 ? 1 : 0;
        const int pb = eaxis == 2 ? 1 : 2;
        const auto& g = gref[slot - 1];
        for (int var = 0; var < 5; ++var) {
            v[37 + 2 * e][var] = g[eaxis][var];
            v[37 + 2 * e + 1][var] = inv_sqrt2 * (off[pa] * g[pa][var] + off[pb] * g[pb][var]);
        }
    }

    for (int s = 0; s < 12; ++s)
        for (int var = 0; var < 5; ++var)
            v[61 + s][var] = stencil[0]->line[s][var] * geom.line_length[s];

    for (int i = 0; i < ReconstructionOperator::unknowns; ++i) {
        const double* row = &op.quartic[i * nr];
        Vec5 acc{};
        for (int c = 0; c < nr; ++c) {
            const double w = row[c];
            if (w == 0.0) continue;
            for (int var = 0; var < 5; ++var) acc[var] += w * v[c][var];
        }
        out.a[i] = acc;
    }

    for (int m = 0; m < 6; ++m) {
        const int axis = m / 2;
        double u[9][5];
        for (int var = 0; var < 5; ++var) u[0][var] = v[1 + m][var];
        int pos = 1;
        for (int c = 0; c < 3; ++c) {
            if (c == axis) continue;
            for (int g = 0; g < 4; ++g, ++pos)
                for (int var = 0; var < 5; ++var) u[pos][var] = v[61 + 4 * c + g][var];
        }
        for (int i = 0; i < 3; ++i) {
            const double* row = &op.sub[m][i * 9];
            Vec5 acc{};
            for (int c = 0; c < 9; ++c)
                for (int var = 0; var < 5; ++var) acc[var] += row[c] * u[c][var];
            out.b[m][i] = acc;
        }
    }
}

namespace {

double quad_form(const std::array<double, 34 * 34>& S, const std::array<Vec5, 34>& a, int var) {
    double acc = 0.0;
    for (int i = 0; i < 34; ++i) {
        const double ai = a[i][var];
        if (ai == 0.0) continue;
        double row = 0.0;
        for (int j = 0; j < 34; ++j) row += S[i * 34 + j] * a[j][var];
        acc += ai * row;
    }
    return acc;
}

}  // namespace

GenoState geno_state(const ReconstructionOperator& op, const GenoParams& p,
                     const CellPolynomials& rec, int var) {
    GenoState st;
    st.is_high = quad_form(op.smooth_full, rec.a, var);
    st.is_low = quad_form(op.smooth_first, rec.a, var);
    // Reference scale: third and fourth derivative content only. Relative to
    // is_high/is_low this vanishes as O(h^2) or faster on smooth data even at
    // critical points (where both indicators drop to curvature size), so the
    // path stays at the quartic under refinement; across a discontinuity the
    // quartic fit is oscillatory and the tail is as large as the full
    // indicator, which drives the path toward the sub-polynomials.
    st.is_tau = quad_form(op.smooth_tail, rec.a, var);

    const double alpha_h = 1.0 + std::pow(st.is_tau / (st.is_high + p.epsilon), p.exponent);
    const double alpha_l = 1.0 + std::pow(st.is_tau / (st.is_low + p.epsilon), p.exponent);
    st.alpha = 2.0 * alpha_h / (alpha_h + alpha_l);
    st.chi = std::tanh(p.sharpness * st.alpha) / std::tanh(p.sharpness);
    st.chi = std::min(1.0, std::max(0.0, st.chi));

    double total = 0.0;
    for (int m = 0; m < 6; ++m) {
        const auto& b = rec.b[m];
        st.is_m[m] = b[0][var] * b[0][var] + b[1][var] * b[1][var] + b[2][var] * b[2][var];
        const double den = st.is_m[m] + p.epsilon;
        const double den2 = den * den;
        st.omega[m] = (1.0 / 6.0) / (den2 * den2 * den);
        total += st.omega[m];
    }
    for (int m = 0; m < 6; ++m) st.omega[m] /= total;
    return st;
}

void blend_linear(const CellPolynomials& rec, BlendedCell& out) {
    out.q0 = rec.q0;
    out.a = rec.a;
}

void blend_nonlinear(const ReconstructionOperator& op, const GenoParams& p,
                     const CellPolynomials& rec, BlendedCell& out,
                     std::array<GenoState, 5>* states) {
    out.q0 = rec.q0;
    for (int var = 0; var < 5; ++var) {
        const GenoState st = geno_state(op, p, rec, var);
        if (states) (*states)[var] = st;
        const double chi = st.chi, rest = 1.0 - st.chi;
        for (int i = 0; i < 34; ++i) out.a[i][var] = chi * rec.a[i][var];
        for (int l = 0; l < 3; ++l) {
            double lin = 0.0;
            for (int m = 0; m < 6; ++m) lin += st.omega[m] * rec.b[m][l][var];
            out.a[l][var] += rest * lin;
        }
    }
}

void make_basis_table(const Vec3& xi, BasisTable& out) {
    quartic_basis().eval_grad(xi, out.val, out.grad);
}

void evaluate_value(const BlendedCell& c, const BasisTable& t, Vec5& value) {
    value = c.q0;
    for (int i = 0; i < 34; ++i)
        for (int var = 0; var < 5; ++var) value[var] += c.a[i][var] * t.val[i];
}

void evaluate(const BlendedCell& c, const BasisTable& t, Vec5& value,
              std::array<Vec5, 3>& grad_ref) {
    value = c.q0;
    for (auto& g : grad_ref) g = Vec5{};
    for (int i = 0; i < 34; ++i) {
        const auto& gi = t.grad[i];
        for (int var = 0; var < 5; ++var) {
            const double av = c.a[i][var];
            value[var] += av * t.val[i];
            grad_ref[0][var] += av * gi.x;
            grad_ref[1][var] += av * gi.y;
            grad_ref[2][var] += av * gi.z;
        }
    }
}

void gradient_to_physical(const Mat3& J0inv, const std::array<Vec5, 3>& grad_ref,
                          std::array<Vec5, 3>& grad_phys) {
    for (int b = 0; b < 3; ++b)
        for (int var = 0; var < 5; ++var)
            grad_phys[b][var] = J0inv(0, b) * grad_ref[0][var] + J0inv(1, b) * grad_ref[1][var] +
                                J0inv(2, b) * grad_ref[2][var];
}

}  // namespace cgks
