#pragma once

#include "vieta/group.hpp"
#include "vieta/tangent.hpp"

namespace vieta {

/// The invariant 2-form
///   Area = dx^dy/(2z+xy-C) = dy^dz/(2x+yz-A) = dz^dx/(2y+zx-B)
/// evaluated on a tangent pair (v,w). The chart with the largest-modulus
/// denominator is used; whenever another denominator exceeds
/// chart_usable_frac of the maximum, pairwise agreement is asserted.
template <FloatScalar S>
S area_form(const SurfaceParams<S>& sp, const SurfacePoint<S>& p, const Vec3<S>& v,
            const Vec3<S>& w, const NumericPolicy& pol = default_policy()) {
    const Vec3<S> g = gradient(sp, p);
    const double scale = norm(v) * norm(w);
    if (mag(dot(g, v)) > pol.frame_solve_tol * norm(g) * norm(v) ||
        mag(dot(g, w)) > pol.frame_solve_tol * norm(g) * norm(w)) {
        throw Error("area_form: arguments are not tangent at p");
    }

    // chart numerators: x-chart uses dy^dz, y-chart dz^dx, z-chart dx^dy
    const S num[3] = {v.y * w.z - v.z * w.y, v.z * w.x - v.x * w.z, v.x * w.y - v.y * w.x};
    const S den[3] = {g.x, g.y, g.z};

    int best = 0;
    for (int i = 1; i < 3; ++i)
        if (mag(den[i]) > mag(den[best])) best = i;
    const double dmax = mag(den[best]);
    if (dmax < pol.grad_zero_tol) throw SingularPointError("area_form: all denominators vanish");

    const S val = num[best] / den[best];
    for (int i = 0; i < 3; ++i) {
        if (i == best || mag(den[i]) < pol.chart_usable_frac * dmax) continue;
        const S alt = num[i] / den[i];
        if (mag(alt - val) > pol.chart_agree_rel_tol * (mag(val) + scale / dmax))
            throw Error("area_form: chart expressions disagree");
    }
    return val;
}

/// Matrix of the involution's differential restricted to the tangent planes,
/// expressed from frame_at_p to frame_at_image: solves the 3x2 least-squares
/// system  E_q * M = J * E_p  column by column via the normal equations and
/// enforces the solve residual.
template <FloatScalar S>
Mat2<S> restricted_differential(Letter l, const SurfaceParams<S>& sp, const SurfacePoint<S>& p,
                                const TangentFrame<S>& frame_at_p,
                                const TangentFrame<S>& frame_at_image,
                                const NumericPolicy& pol = default_policy()) {
    const Mat3<S> j = ambient_jacobian(l, sp, p);
    const Vec3<S> b1 = j.apply(frame_at_p.e1);
    const Vec3<S> b2 = j.apply(frame_at_p.e2);

    const Vec3<S>& f1 = frame_at_image.e1;
    const Vec3<S>& f2 = frame_at_image.e2;
    const Mat2<S> gram{hdot(f1, f1), hdot(f1, f2), hdot(f2, f1), hdot(f2, f2)};

    Mat2<S> m;
    const auto [m11, m21] = solve2(gram, hdot(f1, b1), hdot(f2, b1));
    const auto [m12, m22] = solve2(gram, hdot(f1, b2), hdot(f2, b2));
    m.a = m11; m.b = m12; m.c = m21; m.d = m22;

    const Vec3<S> r1 = b1 - (m.a * f1 + m.c * f2);
    const Vec3<S> r2 = b2 - (m.b * f1 + m.d * f2);
    const double bscale = 1.0 + norm(b1) + norm(b2);
    if (norm(r1) > pol.frame_solve_tol * bscale || norm(r2) > pol.frame_solve_tol * bscale)
        throw FrameMismatchError("restricted_differential: image not in the target tangent plane");
    return m;
}

} // namespace vieta
