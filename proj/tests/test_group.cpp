#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "vieta/area.hpp"
#include "vieta/group.hpp"
#include "vieta/rng.hpp"
#include "vieta/surface.hpp"

using namespace vieta;

namespace {

using P = SurfaceParams<double>;
using Pt = SurfacePoint<double>;
using RP = SurfaceParams<Rational>;
using RPt = SurfacePoint<Rational>;

Rational rat(long num, long den = 1) { return Rational(num, den); }

// An SU(2)-character point together with its surface, drawn from a random
// unitary representation; always lies on the compact component.
std::pair<P, Pt> random_compact_point(RngStream& rng) {
    auto su2 = [&rng]() {
        double q[4];
        for (int i = 0; i < 4; i += 2) {
            const double u1 = std::max(rng.next_uniform(), 1e-300);
            const double u2 = rng.next_uniform();
            const double r = std::sqrt(-2.0 * std::log(u1));
            q[i] = r * std::cos(2.0 * std::numbers::pi * u2);
            q[i + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
        }
        const double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
        const Cplx a(q[0] / n, q[1] / n), b(q[2] / n, q[3] / n);
        return Mat2<Cplx>{a, b, -std::conj(b), std::conj(a)};
    };
    const Mat2<Cplx> ma = su2(), mb = su2(), mc = su2();
    const TraceParams<double> t{ma.trace().real(), mb.trace().real(), mc.trace().real(),
                                (ma * mb * mc).trace().real()};
    return {pi_map(t),
            Pt{(ma * mb).trace().real(), (mb * mc).trace().real(), (mc * ma).trace().real()}};
}

} // namespace

TEST_CASE("apply_letter point maps") {
    const P bk{1, 1, 1, 0};
    const Pt o{0, 0, 0};

    const Pt px = apply_letter(Letter::X, bk, o);
    CHECK(px == Pt{1, 0, 0});
    const Pt py = apply_letter(Letter::Y, bk, px);
    CHECK(py == Pt{1, 1, 0});

    const Pt fixed = apply_letter(Letter::Z, P{0, 0, 0, 4}, Pt{2, 0, 0});
    CHECK(fixed == Pt{2, 0, 0});
}

TEST_CASE("apply_word folds left to right") {
    const P bk{1, 1, 1, 0};
    RngStream rng(21);
    for (int i = 0; i < 100; ++i) {
        const Pt p{rng.next_uniform(-2, 2), rng.next_uniform(-2, 2), rng.next_uniform(-2, 2)};
        CHECK(sup_norm(apply_word(Word{Letter::X, Letter::X}, bk, p) - p) <= 1e-12);
        CHECK(apply_word(Word{}, bk, p) == p);
    }
    CHECK(apply_word(word_from_string("xy"), bk, Pt{0, 0, 0}) == Pt{1, 1, 0});
}

TEST_CASE("reduce deletes adjacent pairs") {
    CHECK(reduce(word_from_string("xx")).empty());
    CHECK(word_to_string(reduce(word_from_string("xyyz"))) == "xz");
    CHECK(word_to_string(reduce(word_from_string("xyx"))) == "xyx");
    CHECK(word_to_string(word_from_string("xyzzy")) == "xyzzy");
    CHECK(is_reduced(reduce(word_from_string("xxyzzyxyzzzzy"))));
}

TEST_CASE("involution law holds to 1e-12, and exactly over rationals") {
    RngStream rng(22);
    for (int i = 0; i < 10000; ++i) {
        const P sp{rng.next_uniform(-2, 2), rng.next_uniform(-2, 2), rng.next_uniform(-2, 2),
                   rng.next_uniform(-4, 4)};
        const Pt p{rng.next_uniform(-3, 3), rng.next_uniform(-3, 3), rng.next_uniform(-3, 3)};
        for (Letter l : {Letter::X, Letter::Y, Letter::Z}) {
            const Pt q = apply_letter(l, sp, apply_letter(l, sp, p));
            CHECK(std::abs(q.x - p.x) <= 1e-12);
            CHECK(std::abs(q.y - p.y) <= 1e-12);
            CHECK(std::abs(q.z - p.z) <= 1e-12);
        }
    }

    const RP sp{rat(1), rat(1), rat(1), rat(0)};
    RngStream rng2(23);
    for (int i = 0; i < 200; ++i) {
        const RPt p{rat(long(rng2.next_below(41))) - 20, rat(long(rng2.next_below(41))) - 20,
                    Rational(rat(long(rng2.next_below(41))) - 20) / 7};
        for (Letter l : {Letter::X, Letter::Y, Letter::Z}) {
            CHECK(apply_letter(l, sp, apply_letter(l, sp, p)) == p);
        }
    }
}

TEST_CASE("involutions preserve the surface") {
    RngStream rng(24);
    int checked = 0;
    while (checked < 2000) {
        const P sp{rng.next_uniform(-2, 2), rng.next_uniform(-2, 2), rng.next_uniform(-2, 2),
                   rng.next_uniform(-4, 4)};
        const double x = rng.next_uniform(-4, 4), y = rng.next_uniform(-4, 4);
        for (double z : solve_fiber_z(sp, x, y)) {
            const Pt p{x, y, z};
            if (std::abs(residual(sp, p)) > 1e-9) continue;
            const double bound = 1e-7 * std::pow(1.0 + norm(p), 3);
            for (Letter l : {Letter::X, Letter::Y, Letter::Z})
                CHECK(std::abs(residual(sp, apply_letter(l, sp, p))) <= bound);
            ++checked;
        }
    }
}

TEST_CASE("apply_word agrees with its reduction on the compact component") {
    RngStream rng(25);
    for (int i = 0; i < 300; ++i) {
        const auto [sp, p] = random_compact_point(rng);
        Word w(rng.next_below(31));
        for (Letter& l : w) l = static_cast<Letter>(rng.next_below(3));
        const Pt a = apply_word(w, sp, p);
        const Pt b = apply_word(reduce(w), sp, p);
        CHECK(sup_norm(a - b) <= 1e-9);
    }
}

TEST_CASE("ambient jacobians") {
    const Mat3<double> jx = ambient_jacobian(Letter::X, P{1, 1, 1, 0}, Pt{0, 0, 0});
    CHECK(jx.m[0][0] == -1.0);
    CHECK(jx.m[0][1] == 0.0);
    CHECK(jx.m[1][1] == 1.0);
    CHECK(jx.m[2][2] == 1.0);

    const Mat3<double> jy = ambient_jacobian(Letter::Y, P{1, 1, 1, 0}, Pt{1, 0, 0});
    CHECK(jy.m[1][0] == 0.0);
    CHECK(jy.m[1][1] == -1.0);
    CHECK(jy.m[1][2] == -1.0);
    CHECK(jy.m[0][0] == 1.0);

    RngStream rng(26);
    for (int i = 0; i < 100; ++i) {
        const P sp{rng.next_uniform(-2, 2), rng.next_uniform(-2, 2), rng.next_uniform(-2, 2),
                   rng.next_uniform(-4, 4)};
        const Pt p{rng.next_uniform(-5, 5), rng.next_uniform(-5, 5), rng.next_uniform(-5, 5)};
        for (Letter l : {Letter::X, Letter::Y, Letter::Z})
            CHECK(ambient_jacobian(l, sp, p).det() == -1.0);
    }
}

TEST_CASE("composing s_z after s_y differs from the printed closed form by xy") {
    // The closed form (x, -xz-y+B, x^2 z - z + C - Bx) misses an xy term in the
    // third coordinate; the library always composes the involutions.
    RngStream rng(27);
    for (int i = 0; i < 100; ++i) {
        const P sp{rng.next_uniform(-2, 2), rng.next_uniform(-2, 2), rng.next_uniform(-2, 2),
                   rng.next_uniform(-4, 4)};
        const Pt p{rng.next_uniform(-2, 2), rng.next_uniform(-2, 2), rng.next_uniform(-2, 2)};
        const Pt actual = apply_word(word_from_string("yz"), sp, p);
        const Pt printed{p.x, -p.x * p.z - p.y + sp.B,
                         p.x * p.x * p.z - p.z + sp.C - sp.B * p.x};
        CHECK(actual.x == printed.x);
        CHECK(actual.y == printed.y);
        CHECK(std::abs(actual.z - (printed.z + p.x * p.y)) <= 1e-12 * (1.0 + std::abs(actual.z)));
    }
}
