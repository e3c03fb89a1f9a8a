#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace cgks {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3 operator-() const { return {-x, -y, -z}; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) { return v / norm(v); }

// Column-major 3x3 matrix: col(j) is the image of the j-th unit vector.
struct Mat3 {
    std::array<double, 9> a{};  // a[3*j + i] = entry (i, j)

    double operator()(int i, int j) const { return a[3 * j + i]; }
    double& operator()(int i, int j) { return a[3 * j + i]; }

    static Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
        Mat3 m;
        for (int i = 0; i < 3; ++i) {
            m(i, 0) = c0[i];
            m(i, 1) = c1[i];
            m(i, 2) = c2[i];
        }
        return m;
    }
    static Mat3 diagonal(double d0, double d1, double d2) {
        Mat3 m;
        m(0, 0) = d0; m(1, 1) = d1; m(2, 2) = d2;
        return m;
    }

    Vec3 col(int j) const { return {a[3 * j], a[3 * j + 1], a[3 * j + 2]}; }

    Vec3 operator*(const Vec3& v) const {
        return {(*this)(0, 0) * v.x + (*this)(0, 1) * v.y + (*this)(0, 2) * v.z,
                (*this)(1, 0) * v.x + (*this)(1, 1) * v.y + (*this)(1, 2) * v.z,
                (*this)(2, 0) * v.x + (*this)(2, 1) * v.y + (*this)(2, 2) * v.z};
    }

    // transpose(M) * v without forming the transpose
    Vec3 tmul(const Vec3& v) const {
        return {dot(col(0), v), dot(col(1), v), dot(col(2), v)};
    }

    double det() const {
        return (*this)(0, 0) * ((*this)(1, 1) * (*this)(2, 2) - (*this)(1, 2) * (*this)(2, 1)) -
               (*this)(0, 1) * ((*this)(1, 0) * (*this)(2, 2) - (*this)(1, 2) * (*this)(2, 0)) +
               (*this)(0, 2) * ((*this)(1, 0) * (*this)(2, 1) - (*this)(1, 1) * (*this)(2, 0));
    }

    Mat3 inverse() const {
        const Mat3& m = *this;
        const double d = det();
        Mat3 r;
        r(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) / d;
        r(0, 1) = (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2)) / d;
        r(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / d;
        r(1, 0) = (m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2)) / d;
        r(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) / d;
        r(1, 2) = (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2)) / d;
        r(2, 0) = (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)) / d;
        r(2, 1) = (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1)) / d;
        r(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) / d;
        return r;
    }
};

inline double det(const Mat3& m) { return m.det(); }
inline Mat3 inverse(const Mat3& m) { return m.inverse(); }

using Vec5 = std::array<double, 5>;

inline Vec5 operator+(const Vec5& a, const Vec5& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3], a[4] + b[4]};
}
inline Vec5 operator-(const Vec5& a, const Vec5& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3], a[4] - b[4]};
}
inline Vec5 operator*(double s, const Vec5& a) {
    return {s * a[0], s * a[1], s * a[2], s * a[3], s * a[4]};
}
inline Vec5 operator-(const Vec5& a) {
    return {-a[0], -a[1], -a[2], -a[3], -a[4]};
}
inline Vec5& operator+=(Vec5& a, const Vec5& b) {
    for (int c = 0; c < 5; ++c) a[c] += b[c];
    return a;
}

}  // namespace cgks
