#pragma once

#include <array>
#include <cmath>

namespace cgks {

// Gauss-Legendre rules on [0, 1].
struct GL {
    static constexpr int n2 = 2;
    static inline const std::array<double, 2> x2 = {0.5 - std::sqrt(3.0) / 6.0,
                                                    0.5 + std::sqrt(3.0) / 6.0};
    static inline const std::array<double, 2> w2 = {0.5, 0.5};

    static constexpr int n3 = 3;
    static inline const std::array<double, 3> x3 = {0.5 - 0.5 * std::sqrt(0.6), 0.5,
                                                    0.5 + 0.5 * std::sqrt(0.6)};
    static inline const std::array<double, 3> w3 = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

    static constexpr int n5 = 5;
    static inline const std::array<double, 5> x5 = {
        0.5 - 0.5 * std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0,
        0.5 - 0.5 * std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0,
        0.5,
        0.5 + 0.5 * std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0,
        0.5 + 0.5 * std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0};
    static inline const std::array<double, 5> w5 = {
        0.5 * (322.0 - 13.0 * std::sqrt(70.0)) / 900.0,
        0.5 * (322.0 + 13.0 * std::sqrt(70.0)) / 900.0,
        0.5 * 128.0 / 225.0,
        0.5 * (322.0 + 13.0 * std::sqrt(70.0)) / 900.0,
        0.5 * (322.0 - 13.0 * std::sqrt(70.0)) / 900.0};
};

}  // namespace cgks
