#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <tuple>

#include "vieta/boundary.hpp"
#include "vieta/rng.hpp"
#include "vieta/walk.hpp"

using namespace vieta;

namespace {

// deterministic reduced word: next letter never equals the previous one
Word random_reduced_word(std::uint64_t seed, std::size_t n) {
    Word w;
    w.reserve(n);
    RngStream rng(seed);
    w.push_back(static_cast<Letter>(rng.next_below(3)));
    while (w.size() < n) {
        const int prev = static_cast<int>(w.back());
        const int step = 1 + static_cast<int>(rng.next_below(2));
        w.push_back(static_cast<Letter>((prev + step) % 3));
    }
    return w;
}

} // namespace

TEST_CASE("reflection matrices square to the identity and act as reflections") {
    const Mat2<long long> sx = reflection_matrix(Letter::X);
    CHECK(sx.a == -1);
    CHECK(sx.b == 2);
    CHECK(sx.c == 0);
    CHECK(sx.d == 1);

    for (Letter l : {Letter::X, Letter::Y, Letter::Z}) {
        const Mat2<long long> m = reflection_matrix(l);
        const Mat2<long long> sq = m * m;
        CHECK(sq.a == 1);
        CHECK(sq.b == 0);
        CHECK(sq.c == 0);
        CHECK(sq.d == 1);
        CHECK(m.det() == -1);
    }

    // sigma_z(z) = -conj(z): the imaginary axis is fixed pointwise
    for (double y : {0.5, 1.0, 3.0}) {
        const Cplx z(0.0, y);
        CHECK(std::abs(reflection_action(Letter::Z, z) - z) < 1e-15);
    }
    // sigma_x(z) = -conj(z) + 2, sigma_y(z) = conj(z) / (2 conj(z) - 1)
    const Cplx z(0.3, 0.8);
    CHECK(std::abs(reflection_action(Letter::X, z) - (-std::conj(z) + 2.0)) < 1e-15);
    CHECK(std::abs(reflection_action(Letter::Y, z) -
                   std::conj(z) / (2.0 * std::conj(z) - 1.0)) < 1e-15);
}

TEST_CASE("normalized products") {
    const NormalizedProduct empty = normalized_product(Word{});
    CHECK(empty.log_norm == 0.0);
    CHECK(op_norm(empty.matrix) == Catch::Approx(1.0).margin(1e-12));

    const NormalizedProduct xy = normalized_product(word_from_string("xy"));
    REQUIRE(xy.exact_valid);
    CHECK(static_cast<long long>(xy.exact.a) == 3);
    CHECK(static_cast<long long>(xy.exact.b) == -2);
    CHECK(static_cast<long long>(xy.exact.c) == 2);
    CHECK(static_cast<long long>(xy.exact.d) == -1);
    CHECK(std::abs(op_norm(xy.matrix) - 1.0) <= 1e-12);

    // log-norm grows linearly along long reduced words
    const Word w = random_reduced_word(5, 1000);
    NormalizedProduct np;
    double half = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        push_letter(np, w[i]);
        if (i + 1 == 500) half = np.log_norm;
    }
    const double s1 = half / 500.0;
    const double s2 = (np.log_norm - half) / 500.0;
    CHECK(s1 > 0.0);
    CHECK(std::abs(s1 - s2) <= 0.1 * std::max(s1, s2));
}

TEST_CASE("rank-one defect") {
    CHECK(rank_one_defect(Mat2<double>::identity()) == 1.0);
    CHECK(rank_one_defect(Mat2<double>{1, 1, 0, 0}) == 0.0);

    const NormalizedProduct np = normalized_product(random_reduced_word(6, 1000));
    CHECK(rank_one_defect(np.matrix) <= 1e-6);
}

TEST_CASE("furstenberg directions are Cauchy and tail-independent") {
    // below ~1e-15 the computed defect is dominated by rounding in the
    // determinant of the normalized product, so the bound carries that floor;
    // the 10x constant is generic, not uniform, hence the statistical form
    const double noise = 1e-12;
    for (std::size_t n : {std::size_t{20}, std::size_t{500}}) {
        int within10 = 0, total = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            auto stream = [seed](std::size_t i) {
                return StepDistribution::uniform().letter_at(seed, i);
            };
            const FurstenbergDirection d1 = furstenberg_direction(stream, n);
            const FurstenbergDirection d2 = furstenberg_direction(stream, 2 * n);
            const double diff2 = angle_distance(d1.angle, d2.angle);
            within10 += diff2 <= 10.0 * d1.defect + noise;

            // a stream altered only after position n stays within the same bound
            auto altered = [seed, n](std::size_t i) {
                const Letter l = StepDistribution::uniform().letter_at(seed, i);
                if (i < n) return l;
                return static_cast<Letter>((static_cast<int>(l) + 1) % 3);
            };
            const FurstenbergDirection d3 = furstenberg_direction(altered, 2 * n);
            const double diff3 = angle_distance(d1.angle, d3.angle);
            within10 += diff3 <= 10.0 * d1.defect + noise;
            total += 2;

            // at the asymptotic scale the bound holds outright
            if (n >= 500) {
                CHECK(diff2 <= 10.0 * d1.defect + noise);
                CHECK(diff3 <= 10.0 * d1.defect + noise);
            }
        }
        CHECK(within10 >= (total * 8) / 10);
    }

    // constant stream: the product alternates between sigma_x (odd steps) and
    // the identity (even steps); the defect never collapses to rank one
    auto constant = [](std::size_t) { return Letter::X; };
    const FurstenbergDirection odd = furstenberg_direction(constant, 999);
    const FurstenbergDirection even = furstenberg_direction(constant, 1000);
    CHECK(odd.defect > 0.17);
    CHECK(even.defect == Catch::Approx(1.0).margin(1e-12));
    CHECK(odd.degenerate);
    CHECK(even.degenerate);
}

TEST_CASE("defect decays exponentially along typical streams") {
    // fit within the window where the defect sits above the rounding floor
    auto stream = [](std::size_t i) { return StepDistribution::uniform().letter_at(99, i); };
    std::vector<double> ns, logs;
    for (int n = 5; n <= 40; n += 5) {
        const FurstenbergDirection d = furstenberg_direction(stream, n);
        if (d.defect < 1e-14) break;
        ns.push_back(n);
        logs.push_back(std::log(d.defect));
    }
    REQUIRE(ns.size() >= 5);
    double mn = 0, ml = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        mn += ns[i] / ns.size();
        ml += logs[i] / logs.size();
    }
    double num = 0, den = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        num += (ns[i] - mn) * (logs[i] - ml);
        den += (ns[i] - mn) * (ns[i] - mn);
    }
    const double slope = num / den;
    CHECK(slope < -0.1);  // fitted c = -slope > 0
    for (std::size_t i = 0; i < ns.size(); ++i)
        CHECK(std::abs(logs[i] - (ml + slope * (ns[i] - mn))) <= 4.0);
}

TEST_CASE("initial letter of the reduced stream") {
    const Word a = word_from_string("xyzxy");
    const InitialLetterResult ra = initial_letter([&](std::size_t i) { return a[i]; }, a.size());
    CHECK(ra.letter == Letter::X);
    CHECK(ra.stabilization_index == 1);

    const Word b = word_from_string("xxyzy");
    const InitialLetterResult rb = initial_letter([&](std::size_t i) { return b[i]; }, 3);
    CHECK(rb.letter == Letter::Y);
    CHECK(rb.stabilization_index == 3);
    CHECK(rb.last_empty_step == 2);

    const Word c = word_from_string("xx");
    CHECK_THROWS_AS(initial_letter([&](std::size_t i) { return c[i]; }, 2), EmptyReduction);

    // at n = 10^4 nearly every stream's initial letter froze within 10^3 steps
    int late = 0;
    const int streams = 1000;
    for (std::uint64_t seed = 0; seed < streams; ++seed) {
        auto s = [seed](std::size_t i) { return StepDistribution::uniform().letter_at(seed, i); };
        const InitialLetterResult r = initial_letter(s, 10000);
        if (r.stabilization_index > 1000) ++late;
    }
    CHECK(static_cast<double>(late) / streams <= 1e-2);
}

TEST_CASE("subdivision cycles") {
    const SubdivisionCycle c0 = subdivision_cycle(0);
    CHECK(c0.depth == std::vector<int>{0, 0, 0});

    const SubdivisionCycle c1 = subdivision_cycle(1);
    CHECK(c1.depth == std::vector<int>{0, 1, 0, 1, 0, 1});

    const SubdivisionCycle c5 = subdivision_cycle(5);
    REQUIRE(c5.depth.size() == 96);
    std::array<int, 6> hist{};
    for (int d : c5.depth) ++hist[d];
    CHECK(hist == std::array<int, 6>{3, 3, 6, 12, 24, 48});

    // every odd position carries the newest depth, between older vertices
    for (std::size_t i = 1; i < c5.depth.size(); i += 2) CHECK(c5.depth[i] == 5);
    for (std::size_t i = 0; i < c5.depth.size(); i += 2) CHECK(c5.depth[i] < 5);

    CHECK_THROWS_AS(subdivision_cycle(21), Error);
}

TEST_CASE("reduce-then-concatenate is associative at the group level") {
    RngStream rng(71);
    for (int i = 0; i < 500; ++i) {
        Word u(rng.next_below(21)), v(rng.next_below(21));
        for (Letter& l : u) l = static_cast<Letter>(rng.next_below(3));
        for (Letter& l : v) l = static_cast<Letter>(rng.next_below(3));
        Word uv = u;
        uv.insert(uv.end(), v.begin(), v.end());
        Word ru_rv = reduce(u);
        const Word rv = reduce(v);
        ru_rv.insert(ru_rv.end(), rv.begin(), rv.end());
        CHECK(reduce(uv) == reduce(ru_rv));
    }
}

TEST_CASE("exact matrix products separate short reduced words up to sign") {
    // enumerate all reduced words of length <= 8 and check the free product
    // embeds: distinct words give distinct matrices modulo global sign
    std::vector<Word> words{{}};
    for (int len = 1; len <= 8; ++len) {
        std::vector<Word> next;
        for (const Word& w : words) {
            if (static_cast<int>(w.size()) != len - 1) continue;
            for (int li = 0; li < 3; ++li) {
                if (!w.empty() && static_cast<int>(w.back()) == li) continue;
                Word e = w;
                e.push_back(static_cast<Letter>(li));
                next.push_back(e);
            }
        }
        words.insert(words.end(), next.begin(), next.end());
    }

    std::set<std::tuple<long long, long long, long long, long long>> seen;
    std::size_t total = 0;
    for (const Word& w : words) {
        if (static_cast<int>(w.size()) > 8) continue;
        const NormalizedProduct np = normalized_product(w);
        REQUIRE(np.exact_valid);
        long long a = static_cast<long long>(np.exact.a), b = static_cast<long long>(np.exact.b);
        long long c = static_cast<long long>(np.exact.c), d = static_cast<long long>(np.exact.d);
        // canonical sign: first nonzero entry positive
        long long lead = a != 0 ? a : (b != 0 ? b : (c != 0 ? c : d));
        if (lead < 0) {
            a = -a;
            b = -b;
            c = -c;
            d = -d;
        }
        CHECK(seen.insert({a, b, c, d}).second);
        ++total;
    }
    CHECK(total == 766);  // 1 + 3 * (2^8 - 1)
}
