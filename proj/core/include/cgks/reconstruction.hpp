#pragma once

#include <array>

#include "cgks/basis.hpp"
#include "cgks/geometry.hpp"
#include "cgks/mesh.hpp"

namespace cgks {

// Compact per-cell unknowns: conservative averages, cell-averaged gradients
// (physical frame), and the 12 face-Gauss-point line-averaged derivatives
// (physical value difference divided by the connector length).
struct CellDOF {
    Vec5 q{};
    std::array<Vec5, 3> grad{};
    std::array<Vec5, 12> line{};
};

// One global operator serves every cell: the constraint system is written on
// the standard stencil (unit cubes at integer offsets of the reference cell)
// and per-cell geometry enters only through the data corrections (C_k volume
// ratios, J0^T gradient maps, line lengths).
//
// RHS layout (73 entries, frozen):
//   [0..18]   C-corrected stencil averages minus the target's own
//   [19..36]  face-neighbor reference gradients, neighbor-major (6 x 3)
//   [37..60]  edge-neighbor directional derivatives (12 x {edge dir, centroid dir})
//   [61..72]  reference line differences, 4*axis + gauss pair
struct ReconstructionOperator {
    static constexpr int rhs_size = 73;
    static constexpr int unknowns = 34;

    // Maps the raw rhs to the 34 quartic coefficients; the least-squares row
    // weights (2 for gradients, 1 for directional, 3 for lines) are folded in.
    std::array<double, unknowns * rhs_size> quartic{};
    // Per face-neighbor linear maps: 9 inputs (average difference + 8
    // perpendicular line differences) to the 3 linear coefficients.
    std::array<std::array<double, 27>, 6> sub{};
    // Smoothness quadratic forms on the reference cell: IS = a^T S a.
    // full sums derivative orders 1..4, first keeps order 1 only, tail keeps
    // orders 3..4 (the reference scale for the path indicator: high-derivative
    // content is higher-order small on smooth data, including at critical
    // points, but dominant across a discontinuity).
    std::array<double, unknowns * unknowns> smooth_full{};
    std::array<double, unknowns * unknowns> smooth_first{};
    std::array<double, unknowns * unknowns> smooth_tail{};

    double cond_strict = 0.0;  // conditioning of the equality block
    double cond_lsq = 0.0;     // conditioning of the projected least-squares block
};

ReconstructionOperator build_reconstruction_operator();
const ReconstructionOperator& reconstruction_operator();

// Quartic + six linear reconstructions of one cell, per conservative variable.
struct CellPolynomials {
    Vec5 q0{};                                  // reference-cell average
    std::array<Vec5, 34> a{};                   // quartic coefficients
    std::array<std::array<Vec5, 3>, 6> b{};     // linear coefficients per sub-stencil
};

void reconstruct_cell(const ReconstructionOperator& op, const CellGeometry& geom,
                      const std::array<const CellDOF*, 19>& stencil, CellPolynomials& out);

struct GenoParams {
    double sharpness = 4.0;  // path steepness C
    double epsilon = 1e-15;
    double exponent = 2.0;   // r in the alpha formulas
};

struct GenoState {
    std::array<double, 6> is_m{};
    double is_high = 0.0, is_low = 0.0, is_tau = 0.0;
    double alpha = 0.0, chi = 1.0;
    std::array<double, 6> omega{};
};

// Indicators and weights for one conservative variable (coefficients strided
// by Vec5 inside CellPolynomials, var selects the component).
GenoState geno_state(const ReconstructionOperator& op, const GenoParams& p,
                     const CellPolynomials& rec, int var);

// Effective single-polynomial form used for evaluation: the nonlinear blend
// folds chi and the weighted sub-polynomials into the coefficients.
struct BlendedCell {
    Vec5 q0{};
    std::array<Vec5, 34> a{};
};

void blend_linear(const CellPolynomials& rec, BlendedCell& out);
void blend_nonlinear(const ReconstructionOperator& op, const GenoParams& p,
                     const CellPolynomials& rec, BlendedCell& out,
                     std::array<GenoState, 5>* states = nullptr);

// Basis values/gradients at one reference point, reusable across cells that
// share Gauss-point preimages (uniform meshes).
struct BasisTable {
    std::array<double, 34> val{};
    std::array<Vec3, 34> grad{};
};

void make_basis_table(const Vec3& xi, BasisTable& out);

void evaluate_value(const BlendedCell& c, const BasisTable& t, Vec5& value);
void evaluate(const BlendedCell& c, const BasisTable& t, Vec5& value,
              std::array<Vec5, 3>& grad_ref);

// Reference gradient back to the physical frame: (J0^T)^{-1} applied per
// variable; pass the cell's stored J0 inverse.
void gradient_to_physical(const Mat3& J0inv, const std::array<Vec5, 3>& grad_ref,
                          std::array<Vec5, 3>& grad_phys);

}  // namespace cgks
