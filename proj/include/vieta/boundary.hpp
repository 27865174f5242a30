#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "vieta/errors.hpp"
#include "vieta/group.hpp"
#include "vieta/linalg.hpp"

namespace vieta {

/// Integer reflection matrices generating the ideal-triangle group in
/// PGL_2(Z): each squares to the identity exactly.
inline Mat2<long long> reflection_matrix(Letter l) {
    switch (l) {
        case Letter::X: return {-1, 2, 0, 1};
        case Letter::Y: return {1, 0, 2, -1};
        default: return {1, 0, 0, -1};
    }
}

/// The reflections act on the upper half plane as anti-Moebius maps
/// z -> (a conj(z) + b) / (c conj(z) + d).
inline Cplx reflection_action(Letter l, const Cplx& z) {
    const Mat2<long long> m = reflection_matrix(l);
    const Cplx zb = std::conj(z);
    return (static_cast<double>(m.a) * zb + static_cast<double>(m.b)) /
           (static_cast<double>(m.c) * zb + static_cast<double>(m.d));
}

/// Running product sigma_{i_1} ... sigma_{i_n}, renormalized to unit operator
/// norm at every step, with the cumulative log-norm tracked. The raw product
/// is also carried in 128-bit integers until its entries overflow, for exact
/// word-discrimination at small lengths.
struct NormalizedProduct {
    Mat2<double> matrix = Mat2<double>::identity();  // unit operator norm
    double log_norm = 0.0;
    std::size_t length = 0;
    bool exact_valid = true;
    Mat2<__int128> exact{1, 0, 0, 1};
};

namespace detail {

inline bool mul_would_overflow(const Mat2<__int128>& a, const Mat2<__int128>& b) {
    const auto big = [](__int128 v) {
        const __int128 lim = static_cast<__int128>(1) << 62;
        return v > lim || v < -lim;
    };
    return big(a.a) || big(a.b) || big(a.c) || big(a.d) || big(b.a) || big(b.b) || big(b.c) ||
           big(b.d);
}

} // namespace detail

inline void push_letter(NormalizedProduct& np, Letter l) {
    const Mat2<long long> g = reflection_matrix(l);
    const Mat2<double> gd{static_cast<double>(g.a), static_cast<double>(g.b),
                          static_cast<double>(g.c), static_cast<double>(g.d)};
    Mat2<double> m = np.matrix * gd;  // new letters multiply on the right
    const double nrm = op_norm(m);
    np.log_norm += std::log(nrm);
    np.matrix = {m.a / nrm, m.b / nrm, m.c / nrm, m.d / nrm};
    ++np.length;

    if (np.exact_valid) {
        const Mat2<__int128> ge{g.a, g.b, g.c, g.d};
        if (detail::mul_would_overflow(np.exact, ge))
            np.exact_valid = false;
        else
            np.exact = np.exact * ge;
    }
}

inline NormalizedProduct normalized_product(const Word& w) {
    NormalizedProduct np;
    for (Letter l : w) push_letter(np, l);
    return np;
}

/// sigma2/sigma1 of a 2x2 matrix, in closed form (sigma1 sigma2 = |det|).
template <FloatScalar S>
double rank_one_defect(const Mat2<S>& m) {
    const double s1 = op_norm(m);
    if (s1 == 0.0) throw Error("rank_one_defect: zero matrix");
    return mag(m.det()) / (s1 * s1);
}

struct FurstenbergDirection {
    double angle = 0.0;   // top singular direction of the image, in [0, pi)
    double defect = 0.0;  // sigma2/sigma1
    double log_norm = 0.0;
    bool degenerate = false;  // defect stuck at 1 (non-generic stream)
};

/// Angle/defect readout of a running product: the top left-singular vector
/// of the normalized matrix, as an angle in [0, pi).
inline FurstenbergDirection direction_of(const NormalizedProduct& np) {
    const Mat2<double>& m = np.matrix;
    // top eigenvector of M M^T
    const double a = m.a * m.a + m.b * m.b;
    const double b = m.a * m.c + m.b * m.d;
    const double c = m.c * m.c + m.d * m.d;
    const double tr = a + c;
    const double gap = std::sqrt(std::max(0.0, (a - c) * (a - c) + 4.0 * b * b));
    const double l1 = 0.5 * (tr + gap);
    double vx, vy;
    if (std::abs(b) > 1e-300) {
        vx = b;
        vy = l1 - a;
    } else {
        vx = a >= c ? 1.0 : 0.0;
        vy = a >= c ? 0.0 : 1.0;
    }
    double angle = std::atan2(vy, vx);
    if (angle < 0.0) angle += std::numbers::pi;
    if (angle >= std::numbers::pi) angle -= std::numbers::pi;

    FurstenbergDirection out;
    out.angle = angle;
    out.defect = rank_one_defect(m);
    out.log_norm = np.log_norm;
    out.degenerate = out.defect > 0.05;  // no rank-1 collapse: non-generic stream
    return out;
}

/// Direction of the image of the normalized product of the first n letters.
template <class LetterAt>
FurstenbergDirection furstenberg_direction(LetterAt&& letter_at, std::size_t n) {
    if (n == 0) throw Error("furstenberg_direction: n must be positive");
    NormalizedProduct np;
    for (std::size_t i = 0; i < n; ++i) push_letter(np, letter_at(i));
    return direction_of(np);
}

inline double angle_distance(double a, double b) {
    double d = std::abs(a - b);
    if (d > std::numbers::pi / 2) d = std::numbers::pi - d;
    return d;
}

/// First letter of the running reduced word of f_0 f_1 ... f_{n-1}, plus the
/// last step at which that first letter changed (it only ever changes when
/// the stack passes through depth zero). Streams whose reduced word is empty
/// at step n have no initial letter (EmptyReduction).
struct InitialLetterResult {
    Letter letter;
    std::uint64_t stabilization_index = 0;  // last step the front changed
    std::uint64_t last_empty_step = 0;      // 0 when the stack never emptied
};

template <class LetterAt>
InitialLetterResult initial_letter(LetterAt&& letter_at, std::size_t n) {
    Word stack;
    std::uint64_t last_front_change = 0;
    std::uint64_t last_empty = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Letter l = letter_at(i);
        const bool had = !stack.empty();
        const Letter front = had ? stack.front() : Letter::X;
        if (!stack.empty() && stack.back() == l)
            stack.pop_back();
        else
            stack.push_back(l);
        if (stack.empty()) last_empty = i + 1;
        const bool has = !stack.empty();
        if (has != had || (has && stack.front() != front)) last_front_change = i + 1;
    }
    if (stack.empty()) throw EmptyReduction("initial_letter: reduced word is empty at step n");
    return {stack.front(), last_front_change, last_empty};
}

/// The cycle C_m of 3 * 2^m vertices obtained from the triangle by m
/// barycentric subdivisions, each vertex labeled with the stage at which it
/// appeared.
struct SubdivisionCycle {
    int m = 0;
    std::vector<int> depth;  // in cycle order
};

inline SubdivisionCycle subdivision_cycle(int m) {
    if (m < 0 || m > 20) throw Error("subdivision_cycle: m out of range");
    SubdivisionCycle out;
    out.m = m;
    out.depth = {0, 0, 0};
    for (int stage = 1; stage <= m; ++stage) {
        std::vector<int> next;
        next.reserve(out.depth.size() * 2);
        for (std::size_t i = 0; i < out.depth.size(); ++i) {
            next.push_back(out.depth[i]);
            next.push_back(stage);  // midpoint of the edge to the successor
        }
        out.depth = std::move(next);
    }
    return out;
}

} // namespace vieta
