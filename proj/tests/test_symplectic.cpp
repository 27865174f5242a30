#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "vieta/group.hpp"
#include "vieta/rng.hpp"
#include "vieta/symplectic.hpp"

using namespace vieta;

namespace {

using P = SurfaceParams<double>;
using Pt = SurfacePoint<double>;

constexpr double kPi = std::numbers::pi;

// Deterministic midpoint quadrature of int f dArea over the compact
// component, via the same chart decomposition the sampler uses but with no
// randomness: an independent oracle for smooth surfaces.
template <class F>
double chart_quadrature(const P& sp, F&& f, int grid) {
    const double box = 2.0 + 1e-9;
    const double h = 2.0 * box / grid;
    double acc = 0.0;
    for (int chart = 0; chart < 3; ++chart)
        for (int iu = 0; iu < grid; ++iu)
            for (int iv = 0; iv < grid; ++iv) {
                const double u = -box + h * (iu + 0.5);
                const double v = -box + h * (iv + 0.5);
                for (double w : solve_fiber(sp, chart, u, v)) {
                    Pt p;
                    p[chart] = w;
                    p[(chart + 1) % 3] = u;
                    p[(chart + 2) % 3] = v;
                    if (sup_norm(p) > box) continue;
                    const Vec3<double> g = gradient(sp, p);
                    if (claiming_chart(g) != chart) continue;
                    acc += f(p) / std::abs(g[chart]) * h * h;
                }
            }
    return acc;
}

} // namespace

TEST_CASE("torus oracle identities for the Cayley cubic") {
    // pullback of the area form along (u,v) -> (-u-1/u, -v-1/v, -uv-1/(uv))
    // is d(theta) ^ d(phi): |Area(P_theta, P_phi)| = 1
    RngStream rng(51);
    const P ca{0, 0, 0, 4};
    for (int i = 0; i < 200; ++i) {
        const double th = rng.next_uniform(0, 2 * kPi), ph = rng.next_uniform(0, 2 * kPi);
        const Pt p{-2 * std::cos(th), -2 * std::cos(ph), -2 * std::cos(th + ph)};
        REQUIRE(std::abs(residual(ca, p)) < 1e-12);
        const Vec3<double> pt{2 * std::sin(th), 0, 2 * std::sin(th + ph)};
        const Vec3<double> pp{0, 2 * std::sin(ph), 2 * std::sin(th + ph)};
        const Vec3<double> g = gradient(ca, p);
        const double num[3] = {pt.y * pp.z - pt.z * pp.y, pt.z * pp.x - pt.x * pp.z,
                               pt.x * pp.y - pt.y * pp.x};
        const int chart = claiming_chart(g);
        if (std::abs(g[chart]) < 1e-6) continue;
        CHECK(std::abs(std::abs(num[chart] / g[chart]) - 1.0) < 1e-9);
    }

    // 1-D quadrature of the angle moments used below
    const int n = 100000;
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double th = 2 * kPi * (i + 0.5) / n;
        m1 += -2 * std::cos(th) / n;
        m2 += 4 * std::cos(th) * std::cos(th) / n;
    }
    CHECK(std::abs(m1) < 1e-12);
    CHECK(std::abs(m2 - 2.0) < 1e-10);
}

TEST_CASE("sampler reproduces the Cayley cubic torus oracle") {
    const P ca{0, 0, 0, 4};
    const SymplecticSample s = sample_symplectic(ca, 400000, 7);
    CHECK(s.surface_singular);
    CHECK(s.clipped_mass_rel < 1e-3);

    // total area of the quotient torus: (2 pi)^2 / 2
    CHECK(std::abs(s.total_area - 2 * kPi * kPi) < 0.01 * 2 * kPi * kPi);

    const MomentVector m = symplectic_moments(s);
    CHECK(std::abs(m.mean[0]) <= 4 * m.se[0]);            // E[x] = 0 by symmetry
    CHECK(std::abs(m.mean[3] - 2.0) <= 0.01);             // E[x^2] = 2
    CHECK(std::abs(m.mean[6]) <= 4 * m.se[6]);            // E[xy] = 0 (independent angles)

    for (const Pt& p : s.points) {
        REQUIRE(std::abs(residual(ca, p)) <= 1e-9);
        REQUIRE(sup_norm(p) <= 2.0 + 1e-9);
    }
}

TEST_CASE("sampler is deterministic per (seed, worker count)") {
    const P sp{1, 1, 1, 0};
    const SymplecticSample a = sample_symplectic(sp, 2000, 11);
    const SymplecticSample b = sample_symplectic(sp, 2000, 11);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i] == b.points[i]);
    const SymplecticSample c = sample_symplectic(sp, 2000, 12);
    CHECK(!(a.points[0] == c.points[0]));
}

TEST_CASE("sampler matches an independent quadrature on a smooth surface") {
    const P bk{1, 1, 1, 0};
    const SymplecticSample s = sample_symplectic(bk, 200000, 3);
    CHECK(s.violations == 0);

    const double area_q = chart_quadrature(bk, [](const Pt&) { return 1.0; }, 1200);
    const double ex2_q =
        chart_quadrature(bk, [](const Pt& p) { return p.x * p.x; }, 1200) / area_q;

    CHECK(std::abs(s.total_area - area_q) <= std::max(4 * s.total_area_se, 0.01 * area_q));
    const MomentVector m = symplectic_moments(s);
    CHECK(std::abs(m.mean[3] - ex2_q) <= std::max(4 * m.se[3], 1e-2));

    // A = B = C: coordinate permutations preserve everything, so the three
    // coordinate means agree
    CHECK(std::abs(m.mean[0] - m.mean[1]) <= 4 * std::hypot(m.se[0], m.se[1]));
    CHECK(std::abs(m.mean[1] - m.mean[2]) <= 4 * std::hypot(m.se[1], m.se[2]));
}

TEST_CASE("moments of a single point are its monomials") {
    const Pt p{0.3, -0.7, 1.1};
    const MomentVector m = symplectic_moments(std::vector<Pt>{p});
    const auto mono = point_monomials(p);
    for (int j = 0; j < 9; ++j) {
        CHECK(m.mean[j] == mono[j]);
        CHECK(m.se[j] == 0.0);
    }
}

TEST_CASE("pushforward invariance of the symplectic measure") {
    const P sp = pi_map(TraceParams<double>{0, 0, 0, 1});
    const SymplecticSample s = sample_symplectic(sp, 50000, 19);
    const MomentVector base = symplectic_moments(s);
    for (Letter l : {Letter::X, Letter::Y, Letter::Z}) {
        std::vector<Pt> mapped;
        mapped.reserve(s.points.size());
        for (const Pt& p : s.points) mapped.push_back(apply_letter(l, sp, p));
        const MomentVector im = symplectic_moments(mapped);
        for (int j = 0; j < 9; ++j)
            CHECK(std::abs(im.mean[j] - base.mean[j]) <=
                  4 * std::hypot(im.se[j], base.se[j]) + 1e-12);
    }
}

TEST_CASE("singleton compact component is reported, not sampled") {
    CHECK_THROWS_AS(sample_symplectic(P{0, 0, 0, 0}, 100, 1), NoCompactComponentError);
}

TEST_CASE("standard error halves when the sample doubles, within factor 1.5") {
    const P sp{1, 1, 1, 0};
    const AreaEstimate a1 = total_area(sp, 50000, 5);
    const AreaEstimate a2 = total_area(sp, 200000, 5);
    CHECK(a2.se < a1.se);
    CHECK(a2.se > a1.se / 2.0 / 1.5);
    CHECK(a2.se < a1.se / 2.0 * 1.5);
}

TEST_CASE("worker-split sampling is deterministic per (seed, worker count)") {
    const P sp{1, 1, 1, 0};
    const SymplecticSample a = sample_symplectic(sp, 4000, 11, default_policy(), 2);
    const SymplecticSample b = sample_symplectic(sp, 4000, 11, default_policy(), 2);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i] == b.points[i]);

    // different worker counts are distinct deterministic streams
    const SymplecticSample c = sample_symplectic(sp, 4000, 11, default_policy(), 1);
    CHECK(a.points.size() == c.points.size());
    const MomentVector ma = symplectic_moments(a), mc = symplectic_moments(c);
    for (int k = 0; k < 9; ++k)
        CHECK(std::abs(ma.mean[k] - mc.mean[k]) <= 5 * std::hypot(ma.se[k], mc.se[k]) + 1e-12);
}
