#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <optional>

#include "vieta/area.hpp"
#include "vieta/group.hpp"
#include "vieta/rng.hpp"
#include "vieta/tangent.hpp"

using namespace vieta;

namespace {

using P = SurfaceParams<double>;
using Pt = SurfacePoint<double>;

struct SmoothDraw {
    P sp;
    Pt p;
};

// Random on-surface point with random real params in [-2,2]^4, filtered to
// the smooth locus.
std::optional<SmoothDraw> draw_smooth(RngStream& rng) {
    const P sp{rng.next_uniform(-2, 2), rng.next_uniform(-2, 2), rng.next_uniform(-2, 2),
               rng.next_uniform(-2, 2)};
    const double x = rng.next_uniform(-3, 3), y = rng.next_uniform(-3, 3);
    const auto roots = solve_fiber_z(sp, x, y);
    if (roots.empty()) return std::nullopt;
    const Pt p{x, y, roots[rng.next_below(roots.size())]};
    if (norm(gradient(sp, p)) < 1e-4) return std::nullopt;
    return SmoothDraw{sp, p};
}

} // namespace

TEST_CASE("area_form hand value and antisymmetry") {
    const P bk{1, 1, 1, 0};
    const Pt o{0, 0, 0};
    const Vec3<double> v{1, -1, 0}, w{1, 0, -1};
    CHECK(area_form(bk, o, v, w) == Catch::Approx(-1.0).epsilon(1e-12));
    CHECK(area_form(bk, o, v, v) == 0.0);
    CHECK(area_form(bk, o, w, v) == -area_form(bk, o, v, w));
}

TEST_CASE("area_form throws when all denominators vanish") {
    CHECK_THROWS_AS(area_form(P{0, 0, 0, 4}, Pt{2, 2, -2}, Vec3<double>{0, 1, 1},
                              Vec3<double>{1, 0, 1}),
                    SingularPointError);
}

TEST_CASE("area form is anti-invariant under each involution") {
    RngStream rng(31);
    int checked = 0;
    while (checked < 10000) {
        const auto d = draw_smooth(rng);
        if (!d) continue;
        const auto& [sp, p] = *d;
        const TangentFrame<double> fr = tangent_frame(sp, p);
        const double c1 = rng.next_uniform(-1, 1), c2 = rng.next_uniform(-1, 1);
        const Vec3<double> v = c1 * fr.e1 + c2 * fr.e2;
        const Vec3<double> w = rng.next_uniform(-1, 1) * fr.e1 + rng.next_uniform(-1, 1) * fr.e2;
        const double before = area_form(sp, p, v, w);
        if (std::abs(before) < 1e-12) continue;
        for (Letter l : {Letter::X, Letter::Y, Letter::Z}) {
            const Pt q = apply_letter(l, sp, p);
            if (norm(gradient(sp, q)) < 1e-4) continue;
            const Mat3<double> j = ambient_jacobian(l, sp, p);
            const double after = area_form(sp, q, j.apply(v), j.apply(w));
            CHECK(std::abs(after + before) <= 1e-8 * (std::abs(before) + std::abs(after)));
        }
        ++checked;
    }
}

TEST_CASE("restricted differential: area determinant is -1") {
    RngStream rng(32);
    int checked = 0;
    while (checked < 2000) {
        const auto d = draw_smooth(rng);
        if (!d) continue;
        const auto& [sp, p] = *d;
        for (Letter l : {Letter::X, Letter::Y, Letter::Z}) {
            const Pt q = apply_letter(l, sp, p);
            if (norm(gradient(sp, q)) < 1e-4) continue;
            const TangentFrame<double> fp = tangent_frame(sp, p);
            const TangentFrame<double> fq = tangent_frame(sp, q);
            const Mat2<double> m = restricted_differential(l, sp, p, fp, fq);
            const double ap = area_form(sp, p, fp.e1, fp.e2);
            const double aq = area_form(sp, q, fq.e1, fq.e2);
            // pullback: det(M) * area_q(f1,f2) = -area_p(e1,e2)
            CHECK(std::abs(m.det() * aq + ap) <= 1e-9 * (std::abs(ap) + std::abs(aq)));
        }
        ++checked;
    }
}

TEST_CASE("restricted differential at a fixed point is an involution") {
    // (0,0,2) on the Cayley cubic is fixed by s_x and smooth.
    const P ca{0, 0, 0, 4};
    const Pt p{0, 0, 2};
    REQUIRE(residual(ca, p) == 0.0);
    REQUIRE(apply_letter(Letter::X, ca, p) == p);
    const TangentFrame<double> f = tangent_frame(ca, p);
    const Mat2<double> m = restricted_differential(Letter::X, ca, p, f, f);
    const Mat2<double> sq = m * m;
    CHECK(std::abs(sq.a - 1.0) <= 1e-9);
    CHECK(std::abs(sq.b) <= 1e-9);
    CHECK(std::abs(sq.c) <= 1e-9);
    CHECK(std::abs(sq.d - 1.0) <= 1e-9);
}

TEST_CASE("restricted differential chain over the origin loop has the catalog invariants") {
    // f = (s_y o s_x)^2 stabilizes the origin of the Boalch-Klein surface; its
    // restricted differential is conjugate to [[2,1],[-1,0]]: trace 2, det 1.
    const P bk{1, 1, 1, 0};
    Pt p{0, 0, 0};
    Mat2<double> acc = Mat2<double>::identity();
    for (Letter l : word_from_string("xyxy")) {
        const Pt q = apply_letter(l, bk, p);
        const TangentFrame<double> fp = tangent_frame(bk, p);
        const TangentFrame<double> fq = tangent_frame(bk, q);
        acc = restricted_differential(l, bk, p, fp, fq) * acc;
        p = q;
    }
    CHECK(p == Pt{0, 0, 0});
    CHECK(acc.trace() == Catch::Approx(2.0).margin(1e-9));
    CHECK(acc.det() == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("frame mismatch is detected") {
    const P bk{1, 1, 1, 0};
    const Pt p{0, 0, 0};
    const TangentFrame<double> fp = tangent_frame(bk, p);
    // a frame taken at an unrelated point cannot absorb the image columns
    const TangentFrame<double> wrong = tangent_frame(bk, Pt{1, 1, 0});
    CHECK_THROWS_AS(restricted_differential(Letter::X, bk, p, fp, wrong), FrameMismatchError);
}
