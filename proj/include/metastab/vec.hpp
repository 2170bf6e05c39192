// Minimal fixed-size vector/matrix types shared by all modules.
#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace metastab {

using complexd = std::complex<double>;

struct Vec3 {
    double x = 0, y = 0, z = 0;

    double& operator[](int i) { return (&x)[i]; }
    double operator[](int i) const { return (&x)[i]; }
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline Vec3 operator*(Vec3 a, double s) { return s * a; }
inline Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
inline Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(Vec3 a) { return a / norm(a); }

struct CVec3 {
    complexd x{0, 0}, y{0, 0}, z{0, 0};

    complexd& operator[](int i) { return (&x)[i]; }
    complexd operator[](int i) const { return (&x)[i]; }
};

inline CVec3 operator+(CVec3 a, CVec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline CVec3 operator-(CVec3 a, CVec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline CVec3 operator*(complexd s, CVec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline CVec3 operator*(complexd s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline CVec3 operator-(CVec3 a) { return {-a.x, -a.y, -a.z}; }

// component-wise a . b without conjugation (bilinear form)
inline complexd dot_bilinear(CVec3 a, CVec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
// sesquilinear a . conj(b)
inline complexd dot_conj(CVec3 a, CVec3 b) {
    return a.x * std::conj(b.x) + a.y * std::conj(b.y) + a.z * std::conj(b.z);
}
inline CVec3 cross(CVec3 a, CVec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline CVec3 cross(CVec3 a, Vec3 b) { return cross(a, CVec3{b.x, b.y, b.z}); }
inline CVec3 cross(Vec3 a, CVec3 b) { return cross(CVec3{a.x, a.y, a.z}, b); }
inline double norm(CVec3 a) { return std::sqrt(std::real(dot_conj(a, a))); }
inline CVec3 to_cvec(Vec3 a) { return {a.x, a.y, a.z}; }

// General (not necessarily symmetric) real 3x3, row-major. Used for Jacobians.
struct Mat3 {
    std::array<double, 9> m{};  // m[3*i+j]

    double& operator()(int i, int j) { return m[3 * i + j]; }
    double operator()(int i, int j) const { return m[3 * i + j]; }

    static Mat3 identity() {
        Mat3 r;
        r(0, 0) = r(1, 1) = r(2, 2) = 1.0;
        return r;
    }
};

inline Vec3 operator*(const Mat3& A, Vec3 v) {
    return {A(0, 0) * v.x + A(0, 1) * v.y + A(0, 2) * v.z,
            A(1, 0) * v.x + A(1, 1) * v.y + A(1, 2) * v.z,
            A(2, 0) * v.x + A(2, 1) * v.y + A(2, 2) * v.z};
}
inline CVec3 operator*(const Mat3& A, CVec3 v) {
    return {A(0, 0) * v.x + A(0, 1) * v.y + A(0, 2) * v.z,
            A(1, 0) * v.x + A(1, 1) * v.y + A(1, 2) * v.z,
            A(2, 0) * v.x + A(2, 1) * v.y + A(2, 2) * v.z};
}
inline Mat3 operator*(const Mat3& A, const Mat3& B) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0;
            for (int k = 0; k < 3; ++k) s += A(i, k) * B(k, j);
            r(i, j) = s;
        }
    return r;
}
inline Mat3 transpose(const Mat3& A) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = A(j, i);
    return r;
}
inline double det(const Mat3& A) {
    return A(0, 0) * (A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1)) -
           A(0, 1) * (A(1, 0) * A(2, 2) - A(1, 2) * A(2, 0)) +
           A(0, 2) * (A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0));
}
inline Mat3 inverse(const Mat3& A) {
    const double d = det(A);
    Mat3 r;
    r(0, 0) = (A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1)) / d;
    r(0, 1) = (A(0, 2) * A(2, 1) - A(0, 1) * A(2, 2)) / d;
    r(0, 2) = (A(0, 1) * A(1, 2) - A(0, 2) * A(1, 1)) / d;
    r(1, 0) = (A(1, 2) * A(2, 0) - A(1, 0) * A(2, 2)) / d;
    r(1, 1) = (A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0)) / d;
    r(1, 2) = (A(0, 2) * A(1, 0) - A(0, 0) * A(1, 2)) / d;
    r(2, 0) = (A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0)) / d;
    r(2, 1) = (A(0, 1) * A(2, 0) - A(0, 0) * A(2, 1)) / d;
    r(2, 2) = (A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0)) / d;
    return r;
}

}  // namespace metastab
