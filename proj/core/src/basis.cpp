#include "cgks/basis.hpp"

#include <cmath>

namespace cgks {

namespace {
constexpr double kFactorial[9] = {1, 1, 2, 6, 24, 120, 720, 5040, 40320};
}

double monomial_average_1d(int k, int offset) {
    const double a = offset + 0.5, b = offset - 0.5;
    return (std::pow(a, k + 1) - std::pow(b, k + 1)) / kFactorial[k + 1];
}

double monomial_average(const std::array<int, 3>& d, const std::array<int, 3>& off) {
    return monomial_average_1d(d[0], off[0]) * monomial_average_1d(d[1], off[1]) *
           monomial_average_1d(d[2], off[2]);
}

double monomial_pair_integral(const std::array<int, 3>& d, const std::array<int, 3>& e) {
    double r = 1.0;
    for (int a = 0; a < 3; ++a) {
        const int k = d[a] + e[a];
        if (k % 2 == 1) return 0.0;
        r *= std::pow(0.5, k) / ((k + 1) * kFactorial[d[a]] * kFactorial[e[a]]);
    }
    return r;
}

QuarticBasis::QuarticBasis() {
    for (auto& pi : slot_)
        for (auto& pj : pi)
            for (int& s : pj) s = -1;
    int n = 0;
    for (int total = 1; total <= 4; ++total)
        for (int dx = total; dx >= 0; --dx)
            for (int dy = total - dx; dy >= 0; --dy) {
                const int dz = total - dx - dy;
                exps_[n] = {dx, dy, dz};
                mean_[n] = monomial_average({dx, dy, dz}, {0, 0, 0});
                slot_[dx][dy][dz] = n;
                ++n;
            }
}

void QuarticBasis::eval(const Vec3& xi, std::array<double, count>& value) const {
    double pw[3][5];
    for (int a = 0; a < 3; ++a) {
        const double d = xi[a] - 0.5;
        pw[a][0] = 1.0;
        for (int k = 1; k <= 4; ++k) pw[a][k] = pw[a][k - 1] * d / k;
    }
    for (int i = 0; i < count; ++i)
        value[i] = pw[0][exps_[i][0]] * pw[1][exps_[i][1]] * pw[2][exps_[i][2]] - mean_[i];
}

void QuarticBasis::eval_grad(const Vec3& xi, std::array<double, count>& value,
                             std::array<Vec3, count>& grad) const {
    double pw[3][5];
    for (int a = 0; a < 3; ++a) {
        const double d = xi[a] - 0.5;
        pw[a][0] = 1.0;
        for (int k = 1; k <= 4; ++k) pw[a][k] = pw[a][k - 1] * d / k;
    }
    for (int i = 0; i < count; ++i) {
        const auto& e = exps_[i];
        value[i] = pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]] - mean_[i];
        grad[i].x = e[0] ? pw[0][e[0] - 1] * pw[1][e[1]] * pw[2][e[2]] : 0.0;
        grad[i].y = e[1] ? pw[0][e[0]] * pw[1][e[1] - 1] * pw[2][e[2]] : 0.0;
        grad[i].z = e[2] ? pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2] - 1] : 0.0;
    }
}

const QuarticBasis& quartic_basis() {
    static const QuarticBasis basis;
    return basis;
}

}  // namespace cgks
