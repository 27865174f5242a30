#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vieta/infinity.hpp"
#include "vieta/rng.hpp"

namespace vieta {

struct GrowthViolation {
    std::string lemma;      // "single-step", "trichotomy", "perturbed"
    std::string word;       // letters as "AB..."
    double alpha0, beta0;
    int step;
    double value;           // offending quantity
};

struct GrowthReport {
    int max_len = 0;
    std::uint64_t words_checked = 0;
    std::uint64_t single_step_checks = 0;
    std::uint64_t prefix_checks = 0;
    std::uint64_t stalled_orbits = 0;
    std::uint64_t perturbed_trials = 0;
    double C = 0.0, R = 0.0;
    double worst_single_step_slack = 1e300;  // min of growth - min(alpha,beta)
    double worst_perturbed_slack = 1e300;    // min of l1 - l1_0 - (R/2) n
    std::vector<GrowthViolation> violations;

    bool ok() const { return violations.empty(); }
};

struct GridSpec {
    double lo = 0.0;
    double hi = 5.0;
    double step = 0.25;
};

namespace detail {

inline std::string mon_word_string(const MonWord& w) {
    std::string s;
    for (MonLetter l : w) s.push_back(l == MonLetter::A ? 'A' : 'B');
    return s;
}

inline bool alternating_from(const MonWord& w, MonLetter first) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        const MonLetter want = (i % 2 == 0) ? first
                                            : (first == MonLetter::A ? MonLetter::B : MonLetter::A);
        if (w[i] != want) return false;
    }
    return true;
}

} // namespace detail

/// Exhaustive falsification harness for the three growth lemmas of the
/// semigroup <A,B> on the nonnegative quadrant:
///   (i)  one-step growth: ||U p||_1 = ||p||_1 + (beta for A, alpha for B),
///        hence >= ||p||_1 + min(alpha,beta);
///   (ii) trichotomy: an orbit whose l1-norm stalls must sit on the boundary
///        and follow the alternating pattern (B-leading when alpha=0,
///        A-leading when beta=0);
///   (iii) perturbed growth: with ||P_k||_1 <= C exp(-2||.||_1) and
///        R >= 2C exp(-2R), starts with min(alpha,beta) >= R grow by at
///        least R/2 per step, against adversarial downward perturbations.
inline GrowthReport verify_growth_lemmas(int max_len, const GridSpec& grid, double C, double R,
                                         int trials_per_word = 1000, std::uint64_t seed = 0) {
    if (max_len > 20) throw Error("verify_growth_lemmas: max_len capped at 20");
    if (!(R >= 2.0 * C * std::exp(-2.0 * R)))
        throw Error("verify_growth_lemmas: R must satisfy R >= 2C exp(-2R)");
    GrowthReport rep;
    rep.max_len = max_len;
    rep.C = C;
    rep.R = R;

    std::vector<LogCoords> points;
    for (double a = grid.lo; a <= grid.hi + 1e-12; a += grid.step)
        for (double b = grid.lo; b <= grid.hi + 1e-12; b += grid.step)
            points.push_back({a, b});

    // (i) single-step identity and bound over the grid
    for (const LogCoords& p : points) {
        for (MonLetter l : {MonLetter::A, MonLetter::B}) {
            const LogCoords q = mon_apply(l, p);
            const double growth = q.l1() - p.l1();
            const double closed = (l == MonLetter::A) ? p.beta : p.alpha;
            ++rep.single_step_checks;
            const double slack = growth - std::min(p.alpha, p.beta);
            rep.worst_single_step_slack = std::min(rep.worst_single_step_slack, slack);
            if (std::abs(growth - closed) > 1e-12 * (1.0 + q.l1()) || slack < -1e-12)
                rep.violations.push_back(
                    {"single-step", l == MonLetter::A ? "A" : "B", p.alpha, p.beta, 1, growth});
        }
    }

    RngStream rng(derive_seed(seed, 0x6060));
    MonWord w;
    for (int len = 1; len <= max_len; ++len) {
        for (std::uint64_t code = 0; code < (1ULL << len); ++code) {
            w.clear();
            for (int i = 0; i < len; ++i)
                w.push_back((code >> i) & 1 ? MonLetter::B : MonLetter::A);
            ++rep.words_checked;

            // (ii) stalled prefixes only in the stated boundary cases
            for (const LogCoords& p0 : points) {
                LogCoords p = p0;
                for (int k = 0; k < len; ++k) {
                    p = mon_apply(w[k], p);
                    ++rep.prefix_checks;
                }
                if (p.l1() == p0.l1()) {
                    ++rep.stalled_orbits;
                    const bool origin = p0.alpha == 0.0 && p0.beta == 0.0;
                    const bool left = p0.alpha == 0.0 && p0.beta > 0.0 &&
                                      detail::alternating_from(w, MonLetter::B);
                    const bool right = p0.beta == 0.0 && p0.alpha > 0.0 &&
                                       detail::alternating_from(w, MonLetter::A);
                    if (!(origin || left || right))
                        rep.violations.push_back({"trichotomy", detail::mon_word_string(w),
                                                  p0.alpha, p0.beta, len, p.l1()});
                }
            }

            // (iii) adversarial perturbed growth from the R-cone
            for (int t = 0; t < trials_per_word; ++t) {
                LogCoords p{R + 5.0 * rng.next_uniform(), R + 5.0 * rng.next_uniform()};
                const double l1_0 = p.l1();
                ++rep.perturbed_trials;
                for (int k = 0; k < len; ++k) {
                    const LogCoords exact = mon_apply(w[k], p);
                    const double budget = C * std::exp(-2.0 * p.l1());
                    const double split = rng.next_uniform();
                    p = {exact.alpha - budget * split, exact.beta - budget * (1.0 - split)};
                    const double slack = p.l1() - l1_0 - 0.5 * R * (k + 1);
                    rep.worst_perturbed_slack = std::min(rep.worst_perturbed_slack, slack);
                    if (slack < -1e-9) {
                        rep.violations.push_back({"perturbed", detail::mon_word_string(w),
                                                  p.alpha, p.beta, k + 1, slack});
                        break;
                    }
                }
            }
        }
    }
    return rep;
}

} // namespace vieta
