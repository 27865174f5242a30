#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <thread>
#include <vector>

#include "vieta/errors.hpp"
#include "vieta/rng.hpp"
#include "vieta/singular.hpp"
#include "vieta/surface.hpp"

namespace vieta {

/// Roots of the fiber quadratic in coordinate `axis`, the other two (cyclic
/// order) being (u,v); axis 2 with (u,v)=(x,y) is solve_fiber_z.
inline std::vector<double> solve_fiber(const SurfaceParams<double>& sp, int axis, double u,
                                       double v) {
    const std::array<double, 3> lin{sp.A, sp.B, sp.C};
    const double b = u * v - lin[axis];
    const double c = u * u + v * v - lin[(axis + 1) % 3] * u - lin[(axis + 2) % 3] * v - sp.D;
    const double disc = b * b - 4.0 * c;
    if (disc < 0.0) return {};
    if (disc == 0.0) return {-b / 2.0};
    const double sq = std::sqrt(disc);
    const double r1 = (b >= 0.0) ? (-b - sq) / 2.0 : (-b + sq) / 2.0;
    if (r1 == 0.0) return {0.0, -b};
    return {r1, c / r1};
}

/// Chart claiming a point: index of the largest |grad F| component, ties
/// broken in the order z -> x -> y.
inline int claiming_chart(const Vec3<double>& g) {
    const double ax = std::abs(g.x), ay = std::abs(g.y), az = std::abs(g.z);
    const double m = std::max(ax, std::max(ay, az));
    if (az == m) return 2;
    if (ax == m) return 0;
    return 1;
}

struct SymplecticSample {
    SurfaceParams<double> params;
    std::uint64_t seed = 0;
    std::vector<SurfacePoint<double>> points;

    double total_area = 0.0;
    double total_area_se = 0.0;
    double acceptance_rate = 0.0;
    std::uint64_t proposals = 0;
    std::uint64_t violations = 0;       // proposals whose density exceeded the envelope
    double clipped_mass_rel = 0.0;      // estimated relative mass lost to clipping
    bool surface_singular = false;
    int workers = 1;
};

struct AreaEstimate {
    double area = 0.0;
    double se = 0.0;
};

namespace detail {

/// Piecewise-constant rejection envelope over (chart, rectangle) proposal
/// space, calibrated by a probing prepass. The density of the symplectic
/// measure in chart i is 1/|grad_i F|, and on the region claimed by chart i
/// this equals the inverse of the largest gradient component. Cells whose
/// density floor sits far below the global scale (singular corners) are
/// subdivided so the envelope tracks the blow-up.
struct EnvelopeEntry {
    int chart;
    double u0, v0, du, dv;
    double bound;   // density envelope M on this rectangle
    double weight;  // 2 * du * dv * M
};

struct Envelope {
    double box = 0.0;
    std::vector<EnvelopeEntry> entries;
    double total_weight = 0.0;
    std::vector<std::uint32_t> alias;  // Walker alias table
    std::vector<double> prob;

    std::size_t pick(RngStream& rng) const {
        const std::size_t k = static_cast<std::size_t>(rng.next_below(entries.size()));
        return rng.next_uniform() < prob[k] ? k : alias[k];
    }
};

/// Minimum claiming-gradient magnitude over a probe grid in the rectangle;
/// negative when no probe lands in the chart's region.
inline double probe_rect_min(const SurfaceParams<double>& sp, int chart, double u0, double v0,
                             double du, double dv, int probes, double box) {
    double local = -1.0;
    for (int pu = 0; pu < probes; ++pu)
        for (int pv = 0; pv < probes; ++pv) {
            const double u = u0 + du * (pu + 0.5) / probes;
            const double v = v0 + dv * (pv + 0.5) / probes;
            for (double w : solve_fiber(sp, chart, u, v)) {
                SurfacePoint<double> p;
                p[chart] = w;
                p[(chart + 1) % 3] = u;
                p[(chart + 2) % 3] = v;
                if (sup_norm(p) > box) continue;
                const Vec3<double> grad = gradient(sp, p);
                if (claiming_chart(grad) != chart) continue;
                const double den = std::abs(grad[chart]);
                if (local < 0.0 || den < local) local = den;
            }
        }
    return local;
}

inline Envelope build_envelope(const SurfaceParams<double>& sp, const NumericPolicy& pol) {
    Envelope env;
    env.box = 2.0 + pol.box_tol;
    const int g = pol.prepass_grid, probes = pol.prepass_probes;
    const double cell = 2.0 * env.box / g;

    std::vector<double> cell_min(static_cast<std::size_t>(3) * g * g, -1.0);
    double global_max = -1.0;
    for (int chart = 0; chart < 3; ++chart)
        for (int iu = 0; iu < g; ++iu)
            for (int iv = 0; iv < g; ++iv) {
                const double m = probe_rect_min(sp, chart, -env.box + cell * iu,
                                                -env.box + cell * iv, cell, cell, probes, env.box);
                cell_min[static_cast<std::size_t>(chart) * g * g + iu * g + iv] = m;
                if (m > global_max) global_max = m;
            }
    if (global_max < 0.0)
        throw NoCompactComponentError("sample_symplectic: prepass found no box points");

    // cells inherit the 3x3 neighborhood minimum, so region slivers just
    // outside the probed set still get proposals
    const double refine_below = 0.05 * global_max;
    for (int chart = 0; chart < 3; ++chart)
        for (int iu = 0; iu < g; ++iu)
            for (int iv = 0; iv < g; ++iv) {
                double nb = -1.0;
                for (int du = -1; du <= 1; ++du)
                    for (int dv = -1; dv <= 1; ++dv) {
                        const int ju = iu + du, jv = iv + dv;
                        if (ju < 0 || jv < 0 || ju >= g || jv >= g) continue;
                        const double m =
                            cell_min[static_cast<std::size_t>(chart) * g * g + ju * g + jv];
                        if (m >= 0.0 && (nb < 0.0 || m < nb)) nb = m;
                    }
                if (nb < 0.0) continue;
                const double u0 = -env.box + cell * iu, v0 = -env.box + cell * iv;
                if (nb >= refine_below) {
                    env.entries.push_back(
                        {chart, u0, v0, cell, cell, 1.0 / (pol.envelope_safety * nb), 0.0});
                    continue;
                }
                // near-singular cell: subdivide; subcells with no probe hits
                // keep the conservative parent floor
                const int r = 16;
                const double sub = cell / r;
                for (int su = 0; su < r; ++su)
                    for (int sv = 0; sv < r; ++sv) {
                        const double m = probe_rect_min(sp, chart, u0 + sub * su, v0 + sub * sv,
                                                        sub, sub, probes, env.box);
                        const double floor = m >= 0.0 ? std::min(m, nb) : nb;
                        env.entries.push_back({chart, u0 + sub * su, v0 + sub * sv, sub, sub,
                                               1.0 / (pol.envelope_safety * floor), 0.0});
                    }
            }

    for (EnvelopeEntry& e : env.entries) {
        e.weight = 2.0 * e.du * e.dv * e.bound;
        env.total_weight += e.weight;
    }

    // Walker alias table
    const std::size_t n = env.entries.size();
    env.prob.assign(n, 0.0);
    env.alias.assign(n, 0);
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = env.entries[i].weight * n / env.total_weight;
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        const std::uint32_t s = small.back(), l = large.back();
        small.pop_back();
        env.prob[s] = scaled[s];
        env.alias[s] = l;
        scaled[l] -= 1.0 - scaled[s];
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (std::uint32_t i : large) env.prob[i] = 1.0;
    for (std::uint32_t i : small) env.prob[i] = 1.0;
    return env;
}

struct StreamResult {
    std::vector<SurfacePoint<double>> points;
    std::uint64_t proposals = 0;
    std::uint64_t violations = 0;
    double sum_a = 0.0;    // unclipped acceptance ratios: unbiased area estimator
    double sum_a2 = 0.0;
    double clipped = 0.0;  // sum of (a-1)+
};

inline StreamResult run_stream(const SurfaceParams<double>& sp, const Envelope& env,
                               std::uint64_t stream_seed, std::size_t want,
                               const NumericPolicy& pol, bool singular) {
    StreamResult out;
    out.points.reserve(want);
    RngStream rng(stream_seed);

    while (out.points.size() < want) {
        ++out.proposals;
        const EnvelopeEntry& e = env.entries[env.pick(rng)];
        const double u = e.u0 + e.du * rng.next_uniform();
        const double v = e.v0 + e.dv * rng.next_uniform();
        const std::uint64_t branch = rng.next_below(2);
        const double a_draw = rng.next_uniform();

        const std::vector<double> roots = solve_fiber(sp, e.chart, u, v);
        if (branch >= roots.size()) continue;
        SurfacePoint<double> p;
        p[e.chart] = roots[branch];
        p[(e.chart + 1) % 3] = u;
        p[(e.chart + 2) % 3] = v;
        if (sup_norm(p) > env.box) continue;
        const Vec3<double> grad = gradient(sp, p);
        if (claiming_chart(grad) != e.chart) continue;

        const double density = 1.0 / std::abs(grad[e.chart]);
        const double a = density / e.bound;
        out.sum_a += a;
        out.sum_a2 += a * a;
        if (a > 1.0) {
            ++out.violations;
            out.clipped += a - 1.0;
            if (!singular)
                throw EnvelopeViolation(
                    "sample_symplectic: density exceeded the envelope on a smooth surface at (" +
                    std::to_string(p.x) + ", " + std::to_string(p.y) + ", " + std::to_string(p.z) +
                    ")");
            // heavy-tailed statistic: only meaningful once the run is long
            if (out.proposals > 100000 && out.clipped > pol.envelope_bias_tol * out.sum_a)
                throw EnvelopeViolation(
                    "sample_symplectic: clipped envelope mass exceeds the bias tolerance");
        }
        if (a_draw < a) out.points.push_back(p);
    }
    return out;
}

inline SymplecticSample sample_core(const SurfaceParams<double>& sp, std::size_t n,
                                    std::uint64_t seed, const NumericPolicy& pol, int workers) {
    if (!sp.is_real()) throw Error("sample_symplectic: params must be real");
    const Envelope env = build_envelope(sp, pol);
    const bool singular = !singular_points(sp, pol).points.empty();

    SymplecticSample out;
    out.params = sp;
    out.seed = seed;
    out.surface_singular = singular;
    out.workers = workers;

    std::vector<StreamResult> parts(workers < 1 ? 1 : workers);
    if (workers <= 1) {
        parts[0] = run_stream(sp, env, derive_seed(seed, 0), n, pol, singular);
    } else {
        std::vector<std::thread> pool;
        std::exception_ptr err;
        std::mutex err_mu;
        for (int w = 0; w < workers; ++w) {
            const std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
            pool.emplace_back([&, w, lo, hi]() {
                try {
                    parts[w] = run_stream(sp, env, derive_seed(seed, w), hi - lo, pol, singular);
                } catch (...) {
                    const std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        if (err) std::rethrow_exception(err);
    }

    double sum_a = 0.0, sum_a2 = 0.0, clipped = 0.0;
    for (const StreamResult& r : parts) {
        out.points.insert(out.points.end(), r.points.begin(), r.points.end());
        out.proposals += r.proposals;
        out.violations += r.violations;
        sum_a += r.sum_a;
        sum_a2 += r.sum_a2;
        clipped += r.clipped;
    }
    const double np = static_cast<double>(out.proposals);
    const double mean_a = sum_a / np;
    out.total_area = env.total_weight * mean_a;
    const double var_a = std::max(0.0, sum_a2 / np - mean_a * mean_a);
    out.total_area_se = env.total_weight * std::sqrt(var_a / np);
    out.acceptance_rate = static_cast<double>(out.points.size()) / np;
    out.clipped_mass_rel = sum_a > 0.0 ? clipped / sum_a : 0.0;
    if (out.clipped_mass_rel > pol.envelope_bias_tol)
        throw EnvelopeViolation(
            "sample_symplectic: clipped envelope mass exceeds the bias tolerance");
    return out;
}

} // namespace detail

/// n i.i.d. draws from the symplectic probability measure on the compact
/// component, by three-chart rejection sampling against a grid-calibrated
/// piecewise envelope. On surfaces with real singular points the density is
/// unbounded at the singularities; the vanishing set of proposals beyond the
/// local envelope is accepted outright and the clipped mass tracked, aborting
/// when it could bias results beyond envelope_bias_tol. On smooth surfaces
/// any envelope violation aborts immediately.
inline SymplecticSample sample_symplectic(const SurfaceParams<double>& sp, std::size_t n,
                                          std::uint64_t seed,
                                          const NumericPolicy& pol = default_policy(),
                                          int workers = 1) {
    return detail::sample_core(sp, n, seed, pol, workers);
}

/// Monte Carlo estimate of the total symplectic area of the compact
/// component, from the same chart decomposition and proposal stream.
inline AreaEstimate total_area(const SurfaceParams<double>& sp, std::size_t n,
                               std::uint64_t seed, const NumericPolicy& pol = default_policy(),
                               int workers = 1) {
    const SymplecticSample s = detail::sample_core(sp, n, seed, pol, workers);
    return {s.total_area, s.total_area_se};
}

/// First and second moments (x, y, z, x^2, y^2, z^2, xy, yz, zx) with
/// jackknife standard errors over delete-one blocks.
struct MomentVector {
    std::array<double, 9> mean{};
    std::array<double, 9> se{};
    std::size_t n = 0;
};

inline std::array<double, 9> point_monomials(const SurfacePoint<double>& p) {
    return {p.x, p.y, p.z, p.x * p.x, p.y * p.y, p.z * p.z, p.x * p.y, p.y * p.z, p.z * p.x};
}

inline MomentVector symplectic_moments(const std::vector<SurfacePoint<double>>& pts,
                                       int blocks = 20) {
    if (pts.empty()) throw Error("symplectic_moments: empty sample");
    MomentVector out;
    out.n = pts.size();
    const int nb = pts.size() < static_cast<std::size_t>(2 * blocks) ? 1 : blocks;

    std::vector<std::array<double, 9>> block_sum(nb, std::array<double, 9>{});
    std::vector<std::size_t> block_n(nb, 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const int b = static_cast<int>(i * nb / pts.size());
        const auto m = point_monomials(pts[i]);
        for (int j = 0; j < 9; ++j) block_sum[b][j] += m[j];
        ++block_n[b];
    }
    std::array<double, 9> total{};
    for (int b = 0; b < nb; ++b)
        for (int j = 0; j < 9; ++j) total[j] += block_sum[b][j];
    for (int j = 0; j < 9; ++j) out.mean[j] = total[j] / static_cast<double>(pts.size());
    if (nb == 1) return out;

    // delete-one-block jackknife
    std::array<double, 9> jk_mean{};
    std::vector<std::array<double, 9>> jk(nb);
    for (int b = 0; b < nb; ++b) {
        const double rest = static_cast<double>(pts.size() - block_n[b]);
        for (int j = 0; j < 9; ++j) {
            jk[b][j] = (total[j] - block_sum[b][j]) / rest;
            jk_mean[j] += jk[b][j] / nb;
        }
    }
    for (int j = 0; j < 9; ++j) {
        double s = 0.0;
        for (int b = 0; b < nb; ++b) s += (jk[b][j] - jk_mean[j]) * (jk[b][j] - jk_mean[j]);
        out.se[j] = std::sqrt(s * (nb - 1) / nb);
    }
    return out;
}

inline MomentVector symplectic_moments(const SymplecticSample& s, int blocks = 20) {
    return symplectic_moments(s.points, blocks);
}

} // namespace vieta
