#pragma once

#include <string>
#include <vector>

#include "vieta/errors.hpp"
#include "vieta/surface.hpp"

namespace vieta {

enum class Letter : unsigned char { X = 0, Y = 1, Z = 2 };

/// Letters applied left-to-right: the first element acts first on the point.
using Word = std::vector<Letter>;

inline char letter_char(Letter l) { return l == Letter::X ? 'x' : (l == Letter::Y ? 'y' : 'z'); }

inline Letter letter_from_char(char c) {
    switch (c) {
        case 'x': case 'X': return Letter::X;
        case 'y': case 'Y': return Letter::Y;
        case 'z': case 'Z': return Letter::Z;
        default: throw Error(std::string("not a letter: ") + c);
    }
}

inline std::string word_to_string(const Word& w) {
    std::string s;
    s.reserve(w.size());
    for (Letter l : w) s.push_back(letter_char(l));
    return s;
}

inline Word word_from_string(const std::string& s) {
    Word w;
    w.reserve(s.size());
    for (char c : s) w.push_back(letter_from_char(c));
    return w;
}

/// The Vieta involutions: each replaces one coordinate by the other root of
/// the defining quadratic and leaves the remaining two bitwise untouched.
template <Scalar S>
SurfacePoint<S> apply_letter(Letter l, const SurfaceParams<S>& sp, const SurfacePoint<S>& p) {
    switch (l) {
        case Letter::X: return {-p.x - p.y * p.z + sp.A, p.y, p.z};
        case Letter::Y: return {p.x, -p.y - p.z * p.x + sp.B, p.z};
        default:        return {p.x, p.y, -p.z - p.x * p.y + sp.C};
    }
}

template <Scalar S>
SurfacePoint<S> apply_word(const Word& w, const SurfaceParams<S>& sp, const SurfacePoint<S>& p) {
    SurfacePoint<S> q = p;
    for (Letter l : w) q = apply_letter(l, sp, q);
    return q;
}

/// Free-product normal form: delete adjacent equal pairs until none remain.
inline Word reduce(const Word& w) {
    Word out;
    out.reserve(w.size());
    for (Letter l : w) {
        if (!out.empty() && out.back() == l)
            out.pop_back();
        else
            out.push_back(l);
    }
    return out;
}

inline bool is_reduced(const Word& w) {
    for (std::size_t i = 1; i < w.size(); ++i)
        if (w[i] == w[i - 1]) return false;
    return true;
}

/// Derivative of the involution at p; affine in one variable, determinant -1.
template <Scalar S>
Mat3<S> ambient_jacobian(Letter l, const SurfaceParams<S>& sp, const SurfacePoint<S>& p) {
    (void)sp;
    const S one = scalar_traits<S>::from_int(1);
    Mat3<S> j = Mat3<S>::identity();
    switch (l) {
        case Letter::X:
            j.m[0][0] = -one; j.m[0][1] = -p.z; j.m[0][2] = -p.y;
            break;
        case Letter::Y:
            j.m[1][0] = -p.z; j.m[1][1] = -one; j.m[1][2] = -p.x;
            break;
        default:
            j.m[2][0] = -p.y; j.m[2][1] = -p.x; j.m[2][2] = -one;
            break;
    }
    return j;
}

} // namespace vieta
