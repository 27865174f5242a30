#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "vieta/errors.hpp"
#include "vieta/linalg.hpp"
#include "vieta/policy.hpp"
#include "vieta/scalar.hpp"

namespace vieta {

/// Coefficients (A,B,C,D) of the cubic surface
///   x^2 + y^2 + z^2 + xyz = A x + B y + C z + D.
template <Scalar S>
struct SurfaceParams {
    S A{}, B{}, C{}, D{};

    bool all_finite() const {
        return is_finite(A) && is_finite(B) && is_finite(C) && is_finite(D);
    }
    bool is_real() const {
        return scalar_traits<S>::imag(A) == 0 && scalar_traits<S>::imag(B) == 0 &&
               scalar_traits<S>::imag(C) == 0 && scalar_traits<S>::imag(D) == 0;
    }
};

/// Boundary traces (a,b,c,d); the surface coefficients are derived from these
/// through pi_map.
template <Scalar S>
struct TraceParams {
    S a{}, b{}, c{}, d{};

    bool all_finite() const {
        return is_finite(a) && is_finite(b) && is_finite(c) && is_finite(d);
    }
};

template <Scalar S>
using SurfacePoint = Vec3<S>;

template <Scalar S>
S residual(const SurfaceParams<S>& sp, const SurfacePoint<S>& p) {
    return p.x * p.x + p.y * p.y + p.z * p.z + p.x * p.y * p.z -
           sp.A * p.x - sp.B * p.y - sp.C * p.z - sp.D;
}

/// Gradient of F = x^2+y^2+z^2+xyz - Ax - By - Cz - D; its components are the
/// three denominators of the invariant area form.
template <Scalar S>
Vec3<S> gradient(const SurfaceParams<S>& sp, const SurfacePoint<S>& p) {
    const S two = scalar_traits<S>::from_int(2);
    return {two * p.x + p.y * p.z - sp.A,
            two * p.y + p.z * p.x - sp.B,
            two * p.z + p.x * p.y - sp.C};
}

template <Scalar S>
bool on_surface(const SurfaceParams<S>& sp, const SurfacePoint<S>& p,
                const NumericPolicy& pol = default_policy()) {
    return mag(residual(sp, p)) <= pol.on_surface_tol;
}

/// (A,B,C,D) = (ab+cd, bc+ad, ac+bd, 4 - (a^2+b^2+c^2+d^2) - abcd).
/// Terms are grouped pairwise so the output is bitwise invariant under the
/// group Q (simultaneous sign change, double-transposition permutations).
template <Scalar S>
SurfaceParams<S> pi_map(const TraceParams<S>& t) {
    const S four = scalar_traits<S>::from_int(4);
    const S sq = (t.a * t.a + t.b * t.b) + (t.c * t.c + t.d * t.d);
    const S prod = (t.a * t.b) * (t.c * t.d);
    return {t.a * t.b + t.c * t.d,
            t.b * t.c + t.a * t.d,
            t.a * t.c + t.b * t.d,
            four - sq - prod};
}

/// Delta = (2(a^2+b^2+c^2+d^2) - abcd - 16)^2 - (4-a^2)(4-b^2)(4-c^2)(4-d^2).
template <Scalar S>
S discriminant(const TraceParams<S>& t) {
    const S four = scalar_traits<S>::from_int(4);
    const S sq = t.a * t.a + t.b * t.b + t.c * t.c + t.d * t.d;
    const S lhs = scalar_traits<S>::from_int(2) * sq - t.a * t.b * t.c * t.d -
                  scalar_traits<S>::from_int(16);
    return lhs * lhs -
           (four - t.a * t.a) * (four - t.b * t.b) * (four - t.c * t.c) * (four - t.d * t.d);
}

/// Magnitude scale of the discriminant's constituent terms, used to turn the
/// Delta == 0 test into a relative one.
template <Scalar S>
double discriminant_scale(const TraceParams<S>& t) {
    const double sq = mag(t.a) * mag(t.a) + mag(t.b) * mag(t.b) + mag(t.c) * mag(t.c) +
                      mag(t.d) * mag(t.d);
    const double abcd = mag(t.a) * mag(t.b) * mag(t.c) * mag(t.d);
    const double lhs = 2.0 * sq + abcd + 16.0;
    const double rhs = (4.0 + mag(t.a) * mag(t.a)) * (4.0 + mag(t.b) * mag(t.b)) *
                       (4.0 + mag(t.c) * mag(t.c)) * (4.0 + mag(t.d) * mag(t.d));
    return lhs * lhs + rhs;
}

/// True iff some trace equals +-2 (within tolerance) or Delta vanishes.
template <Scalar S>
bool is_singular_surface(const TraceParams<S>& t, const NumericPolicy& pol = default_policy()) {
    for (const S* v : {&t.a, &t.b, &t.c, &t.d}) {
        if (mag(*v - scalar_traits<S>::from_int(2)) <= pol.trace_edge_tol) return true;
        if (mag(*v + scalar_traits<S>::from_int(2)) <= pol.trace_edge_tol) return true;
    }
    return mag(discriminant(t)) <= pol.discriminant_rel_tol * discriminant_scale(t);
}

/// Roots of the fiber quadratic z^2 + (xy - C) z + (x^2 + y^2 - Ax - By - D) = 0.
/// The larger-magnitude root is computed first; the other follows from the
/// product of roots. In real mode a negative discriminant yields no roots and
/// an exactly vanishing discriminant yields the double root once.
template <FloatScalar S>
std::vector<S> solve_fiber_z(const SurfaceParams<S>& sp, const S& x, const S& y) {
    const S b = x * y - sp.C;
    const S c = x * x + y * y - sp.A * x - sp.B * y - sp.D;
    if constexpr (scalar_traits<S>::is_complex) {
        const S disc = b * b - scalar_traits<S>::from_int(4) * c;
        const S sq = std::sqrt(disc);
        // pick the branch that avoids cancellation in -b -+ sq
        const S r1 = (mag(-b - sq) >= mag(-b + sq)) ? (-b - sq) / scalar_traits<S>::from_int(2)
                                                    : (-b + sq) / scalar_traits<S>::from_int(2);
        if (mag(r1) == 0.0) return {S{}, S{}};
        if (mag(disc) == 0.0) return {r1};
        return {r1, c / r1};
    } else {
        const double disc = b * b - 4.0 * c;
        if (disc < 0.0) return {};
        if (disc == 0.0) return {-b / 2.0};
        const double sq = std::sqrt(disc);
        const double r1 = (b >= 0.0) ? (-b - sq) / 2.0 : (-b + sq) / 2.0;
        if (r1 == 0.0) return {0.0, -b};
        return {r1, c / r1};
    }
}

/// Membership test for the unique compact component: on-surface (caller's
/// responsibility) plus the [-2,2]^3 box. Exact for SU2-character points and
/// validated by forward invariance under the involutions.
template <Scalar S>
bool in_compact_component(const SurfaceParams<S>& sp, const SurfacePoint<S>& p,
                          const NumericPolicy& pol = default_policy()) {
    if constexpr (scalar_traits<S>::is_complex) {
        if (scalar_traits<S>::imag(p.x) != 0 || scalar_traits<S>::imag(p.y) != 0 ||
            scalar_traits<S>::imag(p.z) != 0 || !sp.is_real()) {
            throw Error("in_compact_component requires real params and a real point");
        }
    }
    (void)sp;
    return sup_norm(p) <= 2.0 + pol.box_tol;
}

} // namespace vieta
