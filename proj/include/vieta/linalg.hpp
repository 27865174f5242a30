#pragma once

#include <array>
#include <cmath>
#include <utility>

#include "vieta/scalar.hpp"

namespace vieta {

template <class S>
struct Vec3 {
    S x{}, y{}, z{};

    S& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    const S& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(const S& c, const Vec3& v) { return {c * v.x, c * v.y, c * v.z}; }
    friend bool operator==(const Vec3& a, const Vec3& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }
};

/// Bilinear dot product (no conjugation); this is the pairing that defines
/// tangency against the gradient.
template <Scalar S>
S dot(const Vec3<S>& a, const Vec3<S>& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

/// Hermitian inner product <a,b> = sum conj(a_i) b_i.
template <Scalar S>
S hdot(const Vec3<S>& a, const Vec3<S>& b) {
    return scalar_traits<S>::conj(a.x) * b.x + scalar_traits<S>::conj(a.y) * b.y +
           scalar_traits<S>::conj(a.z) * b.z;
}

template <Scalar S>
double norm(const Vec3<S>& v) {
    const double ax = mag(v.x), ay = mag(v.y), az = mag(v.z);
    return std::sqrt(ax * ax + ay * ay + az * az);
}

template <Scalar S>
double sup_norm(const Vec3<S>& v) {
    return std::max(mag(v.x), std::max(mag(v.y), mag(v.z)));
}

/// Row-major 3x3 matrix.
template <class S>
struct Mat3 {
    std::array<std::array<S, 3>, 3> m{};

    static Mat3 identity() {
        Mat3 r;
        for (int i = 0; i < 3; ++i) r.m[i][i] = S(1);
        return r;
    }

    Vec3<S> apply(const Vec3<S>& v) const {
        Vec3<S> r;
        for (int i = 0; i < 3; ++i) r[i] = m[i][0] * v.x + m[i][1] * v.y + m[i][2] * v.z;
        return r;
    }

    friend Mat3 operator*(const Mat3& a, const Mat3& b) {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j] + a.m[i][2] * b.m[2][j];
        return r;
    }

    S det() const {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }
};

/// Row-major 2x2 matrix.
template <class S>
struct Mat2 {
    S a{}, b{}, c{}, d{};  // [[a,b],[c,d]]

    static Mat2 identity() { return {S(1), S(0), S(0), S(1)}; }

    S det() const { return a * d - b * c; }
    S trace() const { return a + d; }

    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }

    std::pair<S, S> apply(const S& u, const S& v) const { return {a * u + b * v, c * u + d * v}; }
};

template <Scalar S>
double frob_sq(const Mat2<S>& m) {
    const double aa = mag(m.a), bb = mag(m.b), cc = mag(m.c), dd = mag(m.d);
    return aa * aa + bb * bb + cc * cc + dd * dd;
}

template <Scalar S>
double frob_norm(const Mat2<S>& m) {
    return std::sqrt(frob_sq(m));
}

/// Singular values of a real or complex 2x2 matrix, closed form.
/// Returns {sigma1, sigma2} with sigma1 >= sigma2 >= 0.
template <FloatScalar S>
std::pair<double, double> singular_values(const Mat2<S>& m) {
    const double f2 = frob_sq(m);
    const double dt = mag(m.det());
    const double gap2 = std::max(0.0, (f2 - 2.0 * dt) * (f2 + 2.0 * dt));
    const double s1sq = 0.5 * (f2 + std::sqrt(gap2));
    const double s1 = std::sqrt(s1sq);
    const double s2 = s1 > 0.0 ? dt / s1 : 0.0;
    return {s1, s2};
}

/// Operator (spectral) norm of a 2x2 matrix.
template <FloatScalar S>
double op_norm(const Mat2<S>& m) {
    return singular_values(m).first;
}

/// QR factorization of a real 2x2 matrix by one Givens rotation;
/// R has nonnegative diagonal. Returns {Q, R} with m = Q * R.
inline std::pair<Mat2<double>, Mat2<double>> qr2(const Mat2<double>& m) {
    const double r = std::hypot(m.a, m.c);
    double cs = 1.0, sn = 0.0;
    if (r > 0.0) {
        cs = m.a / r;
        sn = m.c / r;
    }
    // Q^T = [[cs, sn], [-sn, cs]]
    Mat2<double> R{cs * m.a + sn * m.c, cs * m.b + sn * m.d,
                   -sn * m.a + cs * m.c, -sn * m.b + cs * m.d};
    Mat2<double> Q{cs, -sn, sn, cs};
    if (R.d < 0.0) {
        R.c = -R.c;
        R.d = -R.d;
        Q.b = -Q.b;
        Q.d = -Q.d;
    }
    return {Q, R};
}

/// Solve a 2x2 linear system m * (u,v)^T = (p,q)^T by Cramer's rule.
template <Scalar S>
std::pair<S, S> solve2(const Mat2<S>& m, const S& p, const S& q) {
    const S dt = m.det();
    return {(p * m.d - m.b * q) / dt, (m.a * q - p * m.c) / dt};
}

/// Solve a 3x3 system H v = r (Cramer), used by the small Newton iterations.
template <FloatScalar S>
Vec3<S> solve3(const Mat3<S>& h, const Vec3<S>& r) {
    const S dt = h.det();
    Mat3<S> t;
    Vec3<S> out;
    for (int col = 0; col < 3; ++col) {
        t = h;
        for (int i = 0; i < 3; ++i) t.m[i][col] = r[i];
        out[col] = t.det() / dt;
    }
    return out;
}

} // namespace vieta
