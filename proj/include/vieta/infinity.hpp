#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "vieta/errors.hpp"
#include "vieta/group.hpp"
#include "vieta/surface.hpp"

namespace vieta {

/// The three vertices of the triangle at infinity:
/// P1 = [1:0:0:0], P2 = [0:1:0:0], P3 = [0:0:1:0].
enum class ChartId : int { P1 = 0, P2 = 1, P3 = 2 };

inline const char* chart_name(ChartId c) {
    switch (c) {
        case ChartId::P1: return "P1";
        case ChartId::P2: return "P2";
        default: return "P3";
    }
}

/// Indeterminacy vertex of each involution: s_x blows down onto p1, etc.
inline ChartId indeterminacy_vertex(Letter l) { return static_cast<ChartId>(l); }

/// Local coordinates near a vertex, cyclic convention:
///   P1: (u,v) = (y/x, z/x),  P2: (u,v) = (z/y, x/y),  P3: (u,v) = (x/z, y/z).
template <FloatScalar S>
struct ChartCoords {
    ChartId chart;
    S u, v;
};

/// (-log|u|, -log|v|): the monomial shadow acts on these.
struct LogCoords {
    double alpha = 0.0;
    double beta = 0.0;

    double l1() const { return alpha + beta; }
};

template <FloatScalar S>
LogCoords log_coords(const ChartCoords<S>& c) {
    return {-std::log(mag(c.u)), -std::log(mag(c.v))};
}

/// Chart selection: the largest-modulus coordinate wins, ties in the order
/// P3 (z) -> P1 (x) -> P2 (y).
template <FloatScalar S>
ChartCoords<S> to_chart(const SurfacePoint<S>& p,
                        const NumericPolicy& pol = default_policy()) {
    const double ax = mag(p.x), ay = mag(p.y), az = mag(p.z);
    const double m = std::max(ax, std::max(ay, az));
    if (m < pol.chart_threshold)
        throw NotNearInfinity("to_chart: point below the chart threshold");
    if (az == m) return {ChartId::P3, p.x / p.z, p.y / p.z};
    if (ax == m) return {ChartId::P1, p.y / p.x, p.z / p.x};
    return {ChartId::P2, p.z / p.y, p.x / p.y};
}

namespace detail {

/// Leading coefficient of the w^2 term of the chart cubic, cyclic in (A,B,C):
/// P1: A + Bu + Cv, P2: B + Cu + Av, P3: C + Au + Bv.
template <FloatScalar S>
S chart_quadratic_coeff(ChartId chart, const SurfaceParams<S>& sp, const S& u, const S& v) {
    switch (chart) {
        case ChartId::P1: return sp.A + sp.B * u + sp.C * v;
        case ChartId::P2: return sp.B + sp.C * u + sp.A * v;
        default: return sp.C + sp.A * u + sp.B * v;
    }
}

} // namespace detail

/// Height w of the surface graph over the chart plane: the root of
///   D w^3 + E w^2 - (1 + u^2 + v^2) w - uv = 0
/// nearest zero, by Newton from the analytic first-order start.
template <FloatScalar S>
S graph_height(ChartId chart, const SurfaceParams<S>& sp, const S& u, const S& v,
               const NumericPolicy& pol = default_policy()) {
    if (mag(u) > pol.chart_region || mag(v) > pol.chart_region)
        throw NotNearInfinity("graph_height: outside the chart convergence region");
    const S one = scalar_traits<S>::from_int(1);
    const S e = detail::chart_quadratic_coeff(chart, sp, u, v);
    const S lin = one + u * u + v * v;
    S w = -u * v / lin;
    std::string iterates;
    for (int it = 0; it < pol.graph_newton_max_iter; ++it) {
        const S g = sp.D * w * w * w + e * w * w - lin * w - u * v;
        const S dg = scalar_traits<S>::from_int(3) * sp.D * w * w +
                     scalar_traits<S>::from_int(2) * e * w - lin;
        const S step = g / dg;
        w = w - step;
        if (mag(step) <= pol.graph_newton_tol * (1.0 + mag(w))) return w;
        iterates += (it ? " " : "") + std::to_string(mag(w));
    }
    throw NewtonDivergence("graph_height: no convergence at (u,v)=(" + std::to_string(mag(u)) +
                           "," + std::to_string(mag(v)) + "); |w| iterates: " + iterates);
}

/// Quartic Taylor truncation of the P3 graph function:
/// phi3(u,v)/(-uv) = 1 - (u^2+Cuv+v^2) - (Au+Bv)uv
///                 + u^4 + 3C u^3 v + (2-D+2C^2) u^2 v^2 + 3C u v^3 + v^4.
template <FloatScalar S>
S phi3_taylor(const SurfaceParams<S>& sp, const S& u, const S& v) {
    const S one = scalar_traits<S>::from_int(1);
    const S u2 = u * u, v2 = v * v, uv = u * v;
    const S quart = u2 * u2 + scalar_traits<S>::from_int(3) * sp.C * u2 * uv +
                    (scalar_traits<S>::from_int(2) - sp.D +
                     scalar_traits<S>::from_int(2) * sp.C * sp.C) *
                        u2 * v2 +
                    scalar_traits<S>::from_int(3) * sp.C * uv * v2 + v2 * v2;
    return -uv * (one - (u2 + sp.C * uv + v2) - (sp.A * u + sp.B * v) * uv + quart);
}

/// Lift a chart point to projective coordinates, apply the involution's
/// projective formula, and read off the destination chart (the involution's
/// own vertex).
template <FloatScalar S>
ChartCoords<S> chart_transition(Letter l, const SurfaceParams<S>& sp, const ChartCoords<S>& c,
                                const NumericPolicy& pol = default_policy()) {
    if (indeterminacy_vertex(l) == c.chart)
        throw IndeterminacyError(std::string("chart_transition: s_") + letter_char(l) +
                                 " is indeterminate at " + chart_name(c.chart));
    const S w = graph_height(c.chart, sp, c.u, c.v, pol);

    // projective lift [x:y:z:w]
    S x{}, y{}, z{};
    switch (c.chart) {
        case ChartId::P1: x = scalar_traits<S>::from_int(1); y = c.u; z = c.v; break;
        case ChartId::P2: x = c.v; y = scalar_traits<S>::from_int(1); z = c.u; break;
        default: x = c.u; y = c.v; z = scalar_traits<S>::from_int(1); break;
    }

    // the projective image [ix:iy:iz:iw]; only coordinate ratios are read off
    S ix, iy, iz;
    switch (l) {
        case Letter::X:
            ix = -x * w - y * z + sp.A * w * w; iy = y * w; iz = z * w;
            break;
        case Letter::Y:
            ix = x * w; iy = -y * w - z * x + sp.B * w * w; iz = z * w;
            break;
        default:
            ix = x * w; iy = y * w; iz = -z * w - x * y + sp.C * w * w;
            break;
    }

    ChartCoords<S> out;
    out.chart = indeterminacy_vertex(l);
    switch (out.chart) {
        case ChartId::P1: out.u = iy / ix; out.v = iz / ix; break;
        case ChartId::P2: out.u = iz / iy; out.v = ix / iy; break;
        default: out.u = ix / iz; out.v = iy / iz; break;
    }
    if (mag(out.u) > 1.0 || mag(out.v) > 1.0)
        throw NotNearInfinity("chart_transition: image left the chart regions");
    return out;
}

/// The two monomial matrices driving the dynamics at infinity.
enum class MonLetter : unsigned char { A = 0, B = 1 };

struct MonMatrix {
    std::array<std::array<long, 2>, 2> m;
    bool operator==(const MonMatrix&) const = default;
};

inline constexpr MonMatrix kMonA{{{{0, 1}, {1, 1}}}};
inline constexpr MonMatrix kMonB{{{{1, 1}, {1, 0}}}};

inline const MonMatrix& mon_matrix(MonLetter l) { return l == MonLetter::A ? kMonA : kMonB; }

/// Log-coordinate action: A(a,b) = (b, a+b), B(a,b) = (a+b, a).
inline LogCoords mon_apply(MonLetter l, const LogCoords& p) {
    if (l == MonLetter::A) return {p.beta, p.alpha + p.beta};
    return {p.alpha + p.beta, p.alpha};
}

using MonWord = std::vector<MonLetter>;

inline LogCoords semigroup_apply(const MonWord& w, LogCoords p) {
    if (p.alpha < 0.0 || p.beta < 0.0)
        throw Error("semigroup_apply: log coordinates must be nonnegative");
    for (MonLetter l : w) p = mon_apply(l, p);
    return p;
}

/// Which monomial matrix approximates letter `l` from chart `source`, and
/// where the image lands. The s_y/s_z entries follow the cyclic coordinate
/// symmetry of the family and are machine-validated against chart_transition.
inline std::pair<MonLetter, ChartId> monomial_shadow(Letter l, ChartId source) {
    if (indeterminacy_vertex(l) == source)
        throw IndeterminacyError(std::string("monomial_shadow: s_") + letter_char(l) +
                                 " is indeterminate at " + chart_name(source));
    // the A-entry comes from the chart cyclically preceding the letter's
    // vertex, the B-entry from the cyclically following one
    const int target = static_cast<int>(l);
    const int src = static_cast<int>(source);
    const MonLetter m = (src == (target + 1) % 3) ? MonLetter::A : MonLetter::B;
    return {m, static_cast<ChartId>(target)};
}

} // namespace vieta
