#pragma once

#include <vector>

#include "vieta/surface.hpp"

namespace vieta {

struct SingularSearchStats {
    int starts = 0;
    int converged = 0;        // Newton reached a critical point of F
    int accepted = 0;         // ... that also lies on the surface
    int diverged = 0;
};

struct SingularPointsResult {
    std::vector<SurfacePoint<double>> points;
    SingularSearchStats stats;
};

namespace detail {

inline Mat3<double> hessian(const SurfacePoint<double>& p) {
    Mat3<double> h;
    h.m = {{{2.0, p.z, p.y}, {p.z, 2.0, p.x}, {p.y, p.x, 2.0}}};
    return h;
}

} // namespace detail

/// All real singular points of the surface: solutions of grad F = 0 with
/// F = 0, found by multi-start Newton on the critical-point system over a
/// deterministic grid, then re-verified and deduplicated. Never fabricates
/// roots: every returned point satisfies |F| and |grad F| <= grad_zero_tol.
inline SingularPointsResult singular_points(const SurfaceParams<double>& sp,
                                            const NumericPolicy& pol = default_policy()) {
    SingularPointsResult out;
    const int g = pol.newton_grid_points;
    const double r = pol.newton_grid_radius;

    std::vector<double> axis(g);
    for (int i = 0; i < g; ++i)
        axis[i] = g == 1 ? 0.0 : -r + 2.0 * r * static_cast<double>(i) / (g - 1);

    for (double x0 : axis)
        for (double y0 : axis)
            for (double z0 : axis) {
                ++out.stats.starts;
                SurfacePoint<double> p{x0, y0, z0};
                bool ok = false;
                for (int it = 0; it < pol.newton_max_iter; ++it) {
                    const Vec3<double> gvec = gradient(sp, p);
                    if (norm(gvec) <= pol.newton_tol) {
                        ok = true;
                        break;
                    }
                    const Mat3<double> h = detail::hessian(p);
                    if (std::abs(h.det()) < 1e-14) break;
                    const Vec3<double> step = solve3(h, gvec);
                    p = p - step;
                    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) break;
                    if (norm(step) <= pol.newton_tol) {
                        ok = norm(gradient(sp, p)) <= pol.grad_zero_tol;
                        break;
                    }
                }
                if (!ok) {
                    ++out.stats.diverged;
                    continue;
                }
                ++out.stats.converged;
                if (std::abs(residual(sp, p)) > pol.grad_zero_tol) continue;
                if (norm(gradient(sp, p)) > pol.grad_zero_tol) continue;
                bool dup = false;
                for (const auto& q : out.points)
                    if (sup_norm(p - q) <= pol.dedup_dist) {
                        dup = true;
                        break;
                    }
                if (!dup) {
                    out.points.push_back(p);
                    ++out.stats.accepted;
                }
            }
    return out;
}

} // namespace vieta
