#pragma once

#include "vieta/errors.hpp"
#include "vieta/surface.hpp"

namespace vieta {

/// Orthonormal basis (standard Hermitian form) of the tangent plane
/// ker(v -> grad F . v) at a smooth surface point, plus the gradient itself.
template <FloatScalar S>
struct TangentFrame {
    SurfacePoint<S> base;
    Vec3<S> e1, e2;
    Vec3<S> grad;
};

/// Deterministic frame construction: eliminate against the gradient's
/// largest-modulus axis, seeding from the two remaining axes, then one
/// Gram-Schmidt pass.
template <FloatScalar S>
TangentFrame<S> tangent_frame(const SurfaceParams<S>& sp, const SurfacePoint<S>& p,
                              const NumericPolicy& pol = default_policy()) {
    const Vec3<S> g = gradient(sp, p);
    const double gn = norm(g);
    if (gn < pol.grad_zero_tol) throw SingularPointError("tangent_frame: gradient vanishes");

    int imax = 0;
    for (int i = 1; i < 3; ++i)
        if (mag(g[i]) > mag(g[imax])) imax = i;
    const int j = (imax + 1) % 3, k = (imax + 2) % 3;

    Vec3<S> v1{}, v2{};
    v1[j] = scalar_traits<S>::from_int(1);
    v1[imax] = -g[j] / g[imax];
    v2[k] = scalar_traits<S>::from_int(1);
    v2[imax] = -g[k] / g[imax];

    const S inv1 = scalar_traits<S>::from_int(1) / S(norm(v1));
    Vec3<S> e1 = inv1 * v1;
    Vec3<S> w = v2 - hdot(e1, v2) * e1;
    const S inv2 = scalar_traits<S>::from_int(1) / S(norm(w));
    Vec3<S> e2 = inv2 * w;

    // construction-time contract: tangency and an orthonormal, hence
    // well-conditioned, pair
    if (mag(dot(g, e1)) > pol.frame_orth_tol * gn || mag(dot(g, e2)) > pol.frame_orth_tol * gn)
        throw Error("tangent_frame: tangency check failed");
    const Mat2<S> gram{hdot(e1, e1), hdot(e1, e2), hdot(e2, e1), hdot(e2, e2)};
    const auto sv = singular_values(gram);
    if (sv.second < pol.frame_indep_tol)
        throw Error("tangent_frame: frame vectors nearly dependent");

    return {p, e1, e2, g};
}

} // namespace vieta
