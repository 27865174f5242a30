#pragma once

#include <cmath>
#include <complex>
#include <type_traits>

#include <boost/multiprecision/cpp_int.hpp>

namespace vieta {

using Real = double;
using Cplx = std::complex<double>;
using Rational = boost::multiprecision::cpp_rational;

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    static constexpr bool is_complex = false;
    static constexpr bool is_exact = false;
    static double abs(double v) { return std::abs(v); }
    static double real(double v) { return v; }
    static double imag(double) { return 0.0; }
    static double conj(double v) { return v; }
    static bool finite(double v) { return std::isfinite(v); }
    static double from_int(long v) { return static_cast<double>(v); }
};

template <>
struct scalar_traits<Cplx> {
    static constexpr bool is_complex = true;
    static constexpr bool is_exact = false;
    static double abs(const Cplx& v) { return std::abs(v); }
    static double real(const Cplx& v) { return v.real(); }
    static double imag(const Cplx& v) { return v.imag(); }
    static Cplx conj(const Cplx& v) { return std::conj(v); }
    static bool finite(const Cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }
    static Cplx from_int(long v) { return Cplx(static_cast<double>(v), 0.0); }
};

template <>
struct scalar_traits<Rational> {
    static constexpr bool is_complex = false;
    static constexpr bool is_exact = true;
    static Rational abs(const Rational& v) { return v < 0 ? Rational(-v) : v; }
    static Rational real(const Rational& v) { return v; }
    static Rational imag(const Rational&) { return Rational(0); }
    static Rational conj(const Rational& v) { return v; }
    static bool finite(const Rational&) { return true; }
    static Rational from_int(long v) { return Rational(v); }
};

template <class S>
concept Scalar = requires { scalar_traits<S>::is_complex; };

template <class S>
concept FloatScalar = Scalar<S> && !scalar_traits<S>::is_exact;

template <class S>
concept ExactScalar = Scalar<S> && scalar_traits<S>::is_exact;

/// Magnitude as a double, usable in tolerance comparisons for any scalar.
template <Scalar S>
double mag(const S& v) {
    if constexpr (scalar_traits<S>::is_exact) {
        return static_cast<double>(scalar_traits<S>::abs(v));
    } else {
        return scalar_traits<S>::abs(v);
    }
}

template <Scalar S>
bool is_finite(const S& v) {
    return scalar_traits<S>::finite(v);
}

inline double to_double(const Rational& v) { return static_cast<double>(v); }

} // namespace vieta
