#pragma once

#include "vieta/errors.hpp"
#include "vieta/surface.hpp"

namespace vieta {

/// One of the six Benedetto-Goldman cases for the real locus:
///   1: quadruply punctured sphere           (n=0, abcd<0)
///   2: triply punctured torus + disk        (n=0, abcd>0)
///   3: triply punctured sphere + disk       (n=1)
///   4: annulus + two disks                  (n=2)
///   5: four disks                           (n=3)
///   6: four disks + sphere                  (n=4)
struct TopologyClass {
    int case_id = 0;
    int n = 0;                // traces strictly inside (-2,2)
    bool singular = false;
    bool has_compact_component = false;
};

template <Scalar S>
TopologyClass classify_real_topology(const TraceParams<S>& t,
                                     const NumericPolicy& pol = default_policy()) {
    if (scalar_traits<S>::imag(t.a) != 0 || scalar_traits<S>::imag(t.b) != 0 ||
        scalar_traits<S>::imag(t.c) != 0 || scalar_traits<S>::imag(t.d) != 0) {
        throw Error("classify_real_topology requires real traces");
    }
    const double a = mag(scalar_traits<S>::real(t.a)), b = mag(scalar_traits<S>::real(t.b));
    const double c = mag(scalar_traits<S>::real(t.c)), d = mag(scalar_traits<S>::real(t.d));

    TopologyClass out;
    out.n = (a < 2.0) + (b < 2.0) + (c < 2.0) + (d < 2.0);
    out.singular = is_singular_surface(t, pol);

    switch (out.n) {
        case 0: {
            const double prod = scalar_traits<S>::real(t.a) * scalar_traits<S>::real(t.b) *
                                scalar_traits<S>::real(t.c) * scalar_traits<S>::real(t.d);
            out.case_id = prod < 0.0 ? 1 : 2;
            break;
        }
        case 1: out.case_id = 3; break;
        case 2: out.case_id = 4; break;
        case 3: out.case_id = 5; break;
        default: out.case_id = 6; break;
    }
    out.has_compact_component = (out.case_id == 6);
    return out;
}

} // namespace vieta
