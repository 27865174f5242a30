#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <numbers>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "vieta/group.hpp"
#include "vieta/surface.hpp"

namespace vieta {

struct OrbitEdge {
    int from;
    Letter letter;
    int to;
};

/// Either the full finite orbit with its letter-labeled visit graph, or the
/// evidence that the closure exceeded the cap.
template <Scalar S>
struct OrbitResult {
    bool finite = false;
    std::vector<SurfacePoint<S>> points;
    std::vector<OrbitEdge> edges;
    std::size_t cap = 0;
    std::size_t frontier_size = 0;
};

namespace detail {

struct CellKey {
    std::array<std::int64_t, 6> c{};
    bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
    std::size_t operator()(const CellKey& k) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (std::int64_t v : k.c) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 0x100000001b3ULL;
        }
        return h;
    }
};

} // namespace detail

/// Breadth-first closure of q under the three involutions. Points are merged
/// within `tol` (sup-norm); rational inputs are compared exactly. Two distinct
/// accepted points closer than 10*tol raise ToleranceCollision. Points beyond
/// 1e30 in magnitude certify an unbounded orbit and end the search.
template <Scalar S>
OrbitResult<S> orbit_closure(const SurfaceParams<S>& sp, const SurfacePoint<S>& q,
                             std::size_t cap, double tol = default_policy().orbit_match_tol,
                             double collision_factor = default_policy().orbit_collision_factor) {
    OrbitResult<S> out;
    out.cap = cap;

    if constexpr (scalar_traits<S>::is_exact) {
        std::map<std::tuple<S, S, S>, int> index;
        std::vector<SurfacePoint<S>> pts;
        std::deque<int> frontier;
        auto insert = [&](const SurfacePoint<S>& p) {
            auto [it, fresh] = index.try_emplace(std::make_tuple(p.x, p.y, p.z),
                                                 static_cast<int>(pts.size()));
            if (fresh) {
                pts.push_back(p);
                frontier.push_back(it->second);
            }
            return it->second;
        };
        insert(q);
        while (!frontier.empty()) {
            if (pts.size() > cap) {
                out.frontier_size = frontier.size();
                out.points = std::move(pts);
                return out;
            }
            const int i = frontier.front();
            frontier.pop_front();
            const SurfacePoint<S> p = pts[i];
            for (Letter l : {Letter::X, Letter::Y, Letter::Z}) {
                const int j = insert(apply_letter(l, sp, p));
                out.edges.push_back({i, l, j});
            }
        }
        out.finite = true;
        out.points = std::move(pts);
        return out;
    } else {
        std::unordered_map<detail::CellKey, std::vector<int>, detail::CellKeyHash> grid;
        std::vector<SurfacePoint<S>> pts;
        std::deque<int> frontier;
        const double collide = collision_factor * tol;

        auto cell_of = [&](const SurfacePoint<S>& p) {
            detail::CellKey k;
            for (int i = 0; i < 3; ++i) {
                k.c[2 * i] = std::llround(scalar_traits<S>::real(p[i]) / collide);
                k.c[2 * i + 1] = std::llround(scalar_traits<S>::imag(p[i]) / collide);
            }
            return k;
        };
        // probe the +-1 cell neighborhood in every active component
        constexpr int kDims = scalar_traits<S>::is_complex ? 6 : 3;
        auto insert = [&](const SurfacePoint<S>& p) -> int {
            const detail::CellKey c = cell_of(p);
            int nearest = -1;
            double dmin = 1e300;
            int count = 1;  // 3^kDims offsets, enumerated via base-3 digits
            for (int i = 0; i < kDims; ++i) count *= 3;
            for (int code = 0; code < count; ++code) {
                detail::CellKey probe = c;
                int rem = code;
                for (int i = 0; i < kDims; ++i) {
                    const int off = rem % 3 - 1;
                    rem /= 3;
                    probe.c[scalar_traits<S>::is_complex ? i : 2 * i] += off;
                }
                const auto it = grid.find(probe);
                if (it == grid.end()) continue;
                for (int idx : it->second) {
                    const double d = sup_norm(p - pts[idx]);
                    if (d < dmin) {
                        dmin = d;
                        nearest = idx;
                    }
                }
            }
            if (nearest >= 0 && dmin <= tol) return nearest;
            if (nearest >= 0 && dmin <= collide)
                throw ToleranceCollision(
                    "orbit_closure: two distinct points within the collision band");
            const int idx = static_cast<int>(pts.size());
            pts.push_back(p);
            grid[c].push_back(idx);
            frontier.push_back(idx);
            return idx;
        };

        insert(q);
        while (!frontier.empty()) {
            if (pts.size() > cap) {
                out.frontier_size = frontier.size();
                out.points = std::move(pts);
                return out;
            }
            const int i = frontier.front();
            frontier.pop_front();
            const SurfacePoint<S> p = pts[i];
            for (Letter l : {Letter::X, Letter::Y, Letter::Z}) {
                const SurfacePoint<S> img = apply_letter(l, sp, p);
                if (sup_norm(img) > 1e30) {
                    // certifies an unbounded orbit; double precision cannot
                    // bring such a point back
                    out.frontier_size = frontier.size() + 1;
                    out.points = std::move(pts);
                    return out;
                }
                const int j = insert(img);
                out.edges.push_back({i, l, j});
            }
        }
        out.finite = true;
        out.points = std::move(pts);
        return out;
    }
}

struct BoalchKleinOrbit {
    SurfaceParams<double> params;
    std::array<SurfacePoint<double>, 7> points;
    TraceParams<double> witness;
};

/// The exceptional 7-point orbit on x^2+y^2+z^2+xyz = x+y+z, together with a
/// trace quadruple mapping onto (1,1,1,0). Closure and the trace claim are
/// re-verified on every call.
inline BoalchKleinOrbit boalch_klein() {
    BoalchKleinOrbit out;
    out.params = {1, 1, 1, 0};
    out.points = {SurfacePoint<double>{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                  {1, 1, 0},                     {1, 0, 1}, {0, 1, 1}};
    const double c1 = 2.0 * std::cos(2.0 * std::numbers::pi / 7.0);
    const double c2 = 2.0 * std::cos(4.0 * std::numbers::pi / 7.0);
    out.witness = {c1, c1, c1, c2};

    const SurfaceParams<Rational> rp{1, 1, 1, 0};
    const OrbitResult<Rational> closure =
        orbit_closure(rp, SurfacePoint<Rational>{0, 0, 0}, 16);
    if (!closure.finite || closure.points.size() != 7)
        throw Error("boalch_klein: closure verification failed");
    for (const auto& p : closure.points)
        if (residual(rp, p) != 0) throw Error("boalch_klein: point off the surface");

    const SurfaceParams<double> mapped = pi_map(out.witness);
    if (std::abs(mapped.A - 1.0) > 1e-12 || std::abs(mapped.B - 1.0) > 1e-12 ||
        std::abs(mapped.C - 1.0) > 1e-12 || std::abs(mapped.D) > 1e-12)
        throw Error("boalch_klein: trace witness does not map to (1,1,1,0)");
    return out;
}

/// ( -2cos(2 pi p/q), -2cos(2 pi p'/q'), -2cos(2 pi (p/q + p'/q')) ): a point
/// of the Cayley cubic with finite orbit.
inline SurfacePoint<double> cayley_rational_point(long p, long q, long pp, long qp) {
    if (q == 0 || qp == 0) throw Error("cayley_rational_point: zero denominator");
    const double t1 = 2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(q);
    const double t2 = 2.0 * std::numbers::pi * static_cast<double>(pp) / static_cast<double>(qp);
    const SurfacePoint<double> pt{-2.0 * std::cos(t1), -2.0 * std::cos(t2),
                                  -2.0 * std::cos(t1 + t2)};
    if (std::abs(residual(SurfaceParams<double>{0, 0, 0, 4}, pt)) > 1e-12)
        throw Error("cayley_rational_point: residual check failed");
    return pt;
}

struct ShortOrbit2 {
    SurfaceParams<double> params;
    std::array<SurfacePoint<double>, 2> points;
};

/// The 2-parameter family of length-2 orbits {(x,0,0),(x',0,0)} with
/// A = x+x', B = C = 0. The on-surface condition x^2 = Ax + D forces
/// D = -x x' (not the printed 4+x+x'); the constructor re-verifies the swap
/// and the fixes.
inline ShortOrbit2 short_orbit_length2(double x, double xp) {
    if (x == xp) throw Error("short_orbit_length2: x == x'");
    ShortOrbit2 out;
    out.params = {x + xp, 0, 0, -x * xp};
    out.points = {SurfacePoint<double>{x, 0, 0}, SurfacePoint<double>{xp, 0, 0}};

    const double scale = 1.0 + x * x + xp * xp;
    for (const auto& p : out.points)
        if (std::abs(residual(out.params, p)) > 1e-12 * scale)
            throw Error("short_orbit_length2: point off the surface");
    if (sup_norm(apply_letter(Letter::X, out.params, out.points[0]) - out.points[1]) >
        1e-12 * scale)
        throw Error("short_orbit_length2: s_x does not swap the pair");
    for (const auto& p : out.points)
        for (Letter l : {Letter::Y, Letter::Z})
            if (!(apply_letter(l, out.params, p) == p))
                throw Error("short_orbit_length2: s_y/s_z do not fix the pair");
    return out;
}

namespace detail {

/// Exact restriction of an ambient 3x3 rational matrix that maps T_p S into
/// the span of (1,0,-1),(0,1,-1) at the origin.
inline Mat2<Rational> restrict_at_origin(const Mat3<Rational>& j) {
    const Vec3<Rational> v1{1, 0, -1}, v2{0, 1, -1};
    const Vec3<Rational> w1 = j.apply(v1), w2 = j.apply(v2);
    if (w1.z != -w1.x - w1.y || w2.z != -w2.x - w2.y)
        throw Error("restrict_at_origin: image leaves the tangent plane");
    return {w1.x, w2.x, w1.y, w2.y};
}

inline Mat2<Rational> origin_loop_differential(const Word& w) {
    const SurfaceParams<Rational> bk{1, 1, 1, 0};
    SurfacePoint<Rational> p{0, 0, 0};
    Mat3<Rational> acc = Mat3<Rational>::identity();
    for (Letter l : w) {
        acc = ambient_jacobian(l, bk, p) * acc;
        p = apply_letter(l, bk, p);
    }
    if (!(p == SurfacePoint<Rational>{0, 0, 0}))
        throw Error("origin_loop_differential: word does not stabilize the origin");
    return restrict_at_origin(acc);
}

} // namespace detail

struct IntMat2 {
    long a, b, c, d;
    long det() const { return a * d - b * c; }
    bool operator==(const IntMat2&) const = default;
};

/// Differentials at the origin of f=(s_y s_x)^2, g=(s_x s_z)^2, h=(s_z s_y)^2
/// in the (u,v,-u-v) parametrization of T_o S on S_(1,1,1,0); recomputed
/// through the exact chain rule on every call.
inline std::array<IntMat2, 3> origin_differentials() {
    const Mat2<Rational> f = detail::origin_loop_differential(word_from_string("xyxy"));
    const Mat2<Rational> g = detail::origin_loop_differential(word_from_string("zxzx"));
    const Mat2<Rational> h = detail::origin_loop_differential(word_from_string("yzyz"));
    auto as_int = [](const Mat2<Rational>& m) {
        auto cvt = [](const Rational& r) {
            if (boost::multiprecision::denominator(r) != 1)
                throw Error("origin_differentials: non-integer entry");
            return boost::multiprecision::numerator(r).convert_to<long>();
        };
        return IntMat2{cvt(m.a), cvt(m.b), cvt(m.c), cvt(m.d)};
    };
    const std::array<IntMat2, 3> out{as_int(f), as_int(g), as_int(h)};
    const std::array<IntMat2, 3> expected{IntMat2{2, 1, -1, 0}, IntMat2{1, 1, 0, 1},
                                          IntMat2{1, 0, -1, 1}};
    for (int i = 0; i < 3; ++i)
        if (!(out[i] == expected[i]))
            throw Error("origin_differentials: chain rule disagrees with the catalog");
    return out;
}

struct FiberRotation {
    Mat2<double> linear;   // action of s_z o s_y on (y,z) in the fiber {x = x0}
    double angle;          // rotation angle of the elliptic conjugacy class
};

/// Linear part of s_z o s_y on the fiber {x = x0}, obtained by composing the
/// actual involutions; trace x0^2 - 2, determinant 1. Elliptic only for
/// |x0| < 2.
inline FiberRotation fiber_rotation_matrix(const SurfaceParams<double>& sp, double x0) {
    auto composite = [&](double y, double z) {
        const SurfacePoint<double> q =
            apply_word(Word{Letter::Y, Letter::Z}, sp, SurfacePoint<double>{x0, y, z});
        return std::pair<double, double>{q.y, q.z};
    };
    const auto [oy, oz] = composite(0, 0);
    const auto [ay, az] = composite(1, 0);
    const auto [by, bz] = composite(0, 1);
    const Mat2<double> m{ay - oy, by - oy, az - oz, bz - oz};

    const double t = m.trace();
    // trace = x0^2 - 2 >= -2 always; rotation by pi at x0 = 0 is fine, only
    // the |x0| -> 2 side degenerates to a shear
    if (t >= 2.0 - 1e-9)
        throw ParabolicBoundary("fiber_rotation_matrix: trace reaches 2");
    return {m, std::acos(std::max(-1.0, t / 2.0))};
}

/// Exact 2x2 cocycle data over a finite rational orbit: per (point, letter)
/// the matrix of the restricted differential between fixed rational frames.
/// This is the matrix-only oracle for the surface Lyapunov cocycle.
struct OrbitCocycle {
    std::vector<SurfacePoint<double>> points;
    std::vector<std::array<int, 3>> next;                 // [point][letter] -> point
    std::vector<std::array<Mat2<double>, 3>> step;        // [point][letter] -> matrix
};

inline OrbitCocycle orbit_cocycle(const SurfaceParams<Rational>& sp,
                                  const std::vector<SurfacePoint<Rational>>& orbit) {
    const int n = static_cast<int>(orbit.size());
    auto find = [&](const SurfacePoint<Rational>& p) {
        for (int i = 0; i < n; ++i)
            if (orbit[i] == p) return i;
        throw Error("orbit_cocycle: orbit is not closed");
    };

    // Rational frame at each point: eliminate against the largest gradient axis.
    struct Frame {
        Vec3<Rational> v1, v2;
        int jq, kq;  // the axes carrying the unit entries
    };
    std::vector<Frame> frames(n);
    for (int i = 0; i < n; ++i) {
        const Vec3<Rational> g = gradient(sp, orbit[i]);
        int imax = 0;
        for (int a = 1; a < 3; ++a)
            if (scalar_traits<Rational>::abs(g[a]) > scalar_traits<Rational>::abs(g[imax]))
                imax = a;
        if (g[imax] == 0) throw Error("orbit_cocycle: singular orbit point");
        const int j = (imax + 1) % 3, k = (imax + 2) % 3;
        Frame f;
        f.v1[j] = 1;
        f.v1[imax] = -g[j] / g[imax];
        f.v2[k] = 1;
        f.v2[imax] = -g[k] / g[imax];
        f.jq = j;
        f.kq = k;
        frames[i] = f;
    }

    OrbitCocycle out;
    out.points.reserve(n);
    for (const auto& p : orbit)
        out.points.push_back({to_double(p.x), to_double(p.y), to_double(p.z)});
    out.next.resize(n);
    out.step.resize(n);

    for (int i = 0; i < n; ++i) {
        for (Letter l : {Letter::X, Letter::Y, Letter::Z}) {
            const SurfacePoint<Rational> img = apply_letter(l, sp, orbit[i]);
            const int t = find(img);
            const Mat3<Rational> j = ambient_jacobian(l, sp, orbit[i]);
            const Frame& fq = frames[t];
            auto restrict_col = [&](const Vec3<Rational>& vp) {
                const Vec3<Rational> w = j.apply(vp);
                const Rational a = w[fq.jq], c = w[fq.kq];
                const Vec3<Rational> recon = a * fq.v1 + c * fq.v2;
                if (!(recon == w)) throw Error("orbit_cocycle: restriction is inconsistent");
                return std::pair<Rational, Rational>{a, c};
            };
            const auto [a, c] = restrict_col(frames[i].v1);
            const auto [b, d] = restrict_col(frames[i].v2);
            const int li = static_cast<int>(l);
            out.next[i][li] = t;
            out.step[i][li] = Mat2<double>{to_double(a), to_double(b), to_double(c), to_double(d)};
        }
    }
    return out;
}

} // namespace vieta
