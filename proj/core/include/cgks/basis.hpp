#pragma once

#include <array>

#include "cgks/geometry.hpp"

namespace cgks {

// Zero-mean polynomial basis on the reference cell [0,1]^3 with centroid
// (1/2,1/2,1/2): p_d(xi) = prod_a (xi_a - 1/2)^{d_a} / d_a!  minus its average
// over the reference cell, for all multi-indices 1 <= |d| <= 4.
//
// Enumeration order (frozen): total degree ascending; within a degree,
// d_x descending, then d_y descending. Slots 0..2 are the linear monomials.
class QuarticBasis {
public:
    static constexpr int count = 34;

    QuarticBasis();

    const std::array<int, 3>& exponents(int n) const { return exps_[n]; }
    double mean(int n) const { return mean_[n]; }
    // Slot of a multi-index, -1 when |d| is 0 or above 4.
    int slot(int dx, int dy, int dz) const {
        if (dx < 0 || dy < 0 || dz < 0) return -1;
        const int t = dx + dy + dz;
        if (t < 1 || t > 4) return -1;
        return slot_[dx][dy][dz];
    }

    // Values of all 34 zero-mean functions at a reference point.
    void eval(const Vec3& xi, std::array<double, count>& value) const;
    // Values plus reference-frame gradients.
    void eval_grad(const Vec3& xi, std::array<double, count>& value,
                   std::array<Vec3, count>& grad) const;

private:
    std::array<std::array<int, 3>, count> exps_;
    std::array<double, count> mean_;
    int slot_[5][5][5];
};

const QuarticBasis& quartic_basis();

// Average of (t - 1/2 ... ) powers: integral of (xi - c - 1/2)^k / k! for xi
// in the unit interval shifted by integer offset c, i.e. the 1D factor of a
// monomial average over the unit cube centered at integer offset c from the
// target centroid.
double monomial_average_1d(int k, int offset);

// Average of the (non-centered) monomial prod (delta_a)^{d_a}/d_a! over the
// unit cube at integer offset `off` from the target cell.
double monomial_average(const std::array<int, 3>& d, const std::array<int, 3>& off);

// Integral over the reference cell of m_d * m_e (both in the 1/d! scaling),
// used to assemble smoothness quadratic forms in closed form.
double monomial_pair_integral(const std::array<int, 3>& d, const std::array<int, 3>& e);

}  // namespace cgks
