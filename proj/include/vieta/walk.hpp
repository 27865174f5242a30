#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "vieta/area.hpp"
#include "vieta/group.hpp"
#include "vieta/rng.hpp"
#include "vieta/surface.hpp"
#include "vieta/symplectic.hpp"
#include "vieta/tangent.hpp"

namespace vieta {

/// Step distribution mu on {s_x, s_y, s_z}; every weight strictly positive.
struct StepDistribution {
    double px, py, pz;

    StepDistribution(double x, double y, double z) : px(x), py(y), pz(z) {
        if (!(px > 0.0) || !(py > 0.0) || !(pz > 0.0))
            throw Error("StepDistribution: all three weights must be positive");
        if (std::abs(px + py + pz - 1.0) > 1e-12)
            throw Error("StepDistribution: weights must sum to 1");
    }

    static StepDistribution uniform() { return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}; }

    /// The letter at a given position of the stream; pure in (seed, index).
    Letter letter_at(std::uint64_t seed, std::uint64_t index) const {
        const double u = counter_uniform(seed, index);
        if (u < px) return Letter::X;
        if (u < px + py) return Letter::Y;
        return Letter::Z;
    }
};

inline Word sample_letters(const StepDistribution& mu, std::uint64_t seed, std::size_t n) {
    Word w;
    w.reserve(n);
    for (std::size_t i = 0; i < n; ++i) w.push_back(mu.letter_at(seed, i));
    return w;
}

inline std::uint64_t fnv1a_update(std::uint64_t h, unsigned char byte) {
    return (h ^ byte) * 0x100000001b3ULL;
}

/// Seeded random orbit (f^j(q))_{j<=N} with escape detection, thinned point
/// storage and running moment accumulators over every visited point.
struct TrajectoryRecord {
    SurfaceParams<double> params;
    SurfacePoint<double> start;
    StepDistribution mu = StepDistribution::uniform();
    std::uint64_t seed = 0;
    std::uint64_t n_steps = 0;      // requested
    std::uint64_t steps_taken = 0;  // possibly fewer on escape
    int thin = 1;

    std::vector<SurfacePoint<double>> samples;  // every thin-th visited point
    std::uint64_t letters_digest = 0xcbf29ce484222325ULL;  // FNV-1a over "xyz" chars
    bool escaped = false;
    std::uint64_t first_escape_step = 0;
    double max_log_norm = 0.0;

    static constexpr std::array<double, 3> kBallRadii{4.0, 16.0, 256.0};
    std::array<double, 9> moment_sum{};
    std::vector<std::array<double, 9>> block_moment_sum;  // batch means for errors
    std::vector<std::uint64_t> block_count;
    std::uint64_t visited = 0;
    std::uint64_t in_box = 0;
    std::array<std::uint64_t, 3> in_ball{};
};

inline TrajectoryRecord run_trajectory(const SurfaceParams<double>& sp,
                                       const SurfacePoint<double>& q, const StepDistribution& mu,
                                       std::uint64_t n, std::uint64_t seed, int thin = 1,
                                       const NumericPolicy& pol = default_policy()) {
    if (thin < 1) throw Error("run_trajectory: thin must be >= 1");
    TrajectoryRecord rec;
    rec.params = sp;
    rec.start = q;
    rec.mu = mu;
    rec.seed = seed;
    rec.n_steps = n;
    rec.thin = thin;
    rec.block_moment_sum.assign(pol.moment_blocks, {});
    rec.block_count.assign(pol.moment_blocks, 0);
    rec.max_log_norm = std::log(std::max(sup_norm(q), 1e-300));

    SurfacePoint<double> p = q;
    for (std::uint64_t j = 0; j < n; ++j) {
        const Letter l = mu.letter_at(seed, j);
        p = apply_letter(l, sp, p);
        rec.letters_digest =
            fnv1a_update(rec.letters_digest, static_cast<unsigned char>(letter_char(l)));
        ++rec.steps_taken;

        const double nrm = sup_norm(p);
        if (!std::isfinite(nrm))
            throw OverflowGuard("run_trajectory: non-finite coordinates before escape cutoff");
        rec.max_log_norm = std::max(rec.max_log_norm, std::log(std::max(nrm, 1e-300)));

        ++rec.visited;
        const auto mono = point_monomials(p);
        const int b = static_cast<int>(j * rec.block_moment_sum.size() / n);
        for (int k = 0; k < 9; ++k) {
            rec.moment_sum[k] += mono[k];
            rec.block_moment_sum[b][k] += mono[k];
        }
        ++rec.block_count[b];
        if (nrm <= 2.0 + pol.box_tol) ++rec.in_box;
        for (int k = 0; k < 3; ++k)
            if (nrm <= TrajectoryRecord::kBallRadii[k]) ++rec.in_ball[k];

        if (rec.steps_taken % static_cast<std::uint64_t>(thin) == 0) rec.samples.push_back(p);

        if (nrm > pol.escape_radius) {
            rec.escaped = true;
            rec.first_escape_step = rec.steps_taken;
            break;
        }
    }
    return rec;
}

/// Moments of the empirical measure nu_N (all visited points), batch-mean
/// standard errors, and the compact-mass profile.
struct EmpiricalSummary {
    MomentVector moments;
    double box_fraction = 0.0;
    std::array<double, 3> ball_fraction{};  // radii 4, 16, 256
    bool escaped = false;
    std::uint64_t steps = 0;
};

inline EmpiricalSummary empirical_summary(const TrajectoryRecord& rec) {
    if (rec.visited == 0) throw Error("empirical_summary: empty trajectory");
    EmpiricalSummary out;
    out.escaped = rec.escaped;
    out.steps = rec.steps_taken;
    const double n = static_cast<double>(rec.visited);
    out.moments.n = rec.visited;
    for (int k = 0; k < 9; ++k) out.moments.mean[k] = rec.moment_sum[k] / n;
    out.box_fraction = static_cast<double>(rec.in_box) / n;
    for (int k = 0; k < 3; ++k)
        out.ball_fraction[k] = static_cast<double>(rec.in_ball[k]) / n;

    // batch-mean errors over the recorded blocks (correlated samples)
    int nb = 0;
    for (std::uint64_t c : rec.block_count)
        if (c > 0) ++nb;
    if (nb >= 4) {
        for (int k = 0; k < 9; ++k) {
            double mean = 0.0;
            std::vector<double> bm;
            for (std::size_t b = 0; b < rec.block_count.size(); ++b)
                if (rec.block_count[b] > 0) {
                    bm.push_back(rec.block_moment_sum[b][k] /
                                 static_cast<double>(rec.block_count[b]));
                    mean += bm.back();
                }
            mean /= nb;
            double s = 0.0;
            for (double v : bm) s += (v - mean) * (v - mean);
            out.moments.se[k] = std::sqrt(s / (nb - 1) / nb);
        }
    }
    return out;
}

/// QR-renormalized 2x2 cocycle accumulator: the standard discrete method for
/// the top two Lyapunov exponents of a matrix product.
class QrCocycle {
  public:
    explicit QrCocycle(int cadence, int blocks)
        : cadence_(cadence), block_sums_(blocks, {0.0, 0.0}), block_steps_(blocks, 0) {}

    void push(const Mat2<double>& m, int block) {
        cur_ = m * cur_;
        ++pending_;
        ++steps_;
        block_ = block;
        if (pending_ >= cadence_) renormalize();
    }

    void finish() {
        if (pending_ > 0) renormalize();
    }

    std::uint64_t steps() const { return steps_; }
    double log_sum_top() const { return sum_[0]; }
    double log_sum_bot() const { return sum_[1]; }
    const std::vector<std::array<double, 2>>& block_sums() const { return block_sums_; }
    const std::vector<std::uint64_t>& block_steps() const { return block_steps_; }

  private:
    void renormalize() {
        const auto [q, r] = qr2(cur_);
        // diag(R) > 0 by construction
        const double l1 = std::log(r.a), l2 = std::log(r.d);
        sum_[0] += l1;
        sum_[1] += l2;
        block_sums_[block_][0] += l1;
        block_sums_[block_][1] += l2;
        block_steps_[block_] += pending_;
        cur_ = q;
        pending_ = 0;
    }

    int cadence_;
    Mat2<double> cur_ = Mat2<double>::identity();
    int pending_ = 0;
    std::uint64_t steps_ = 0;
    int block_ = 0;
    std::array<double, 2> sum_{};
    std::vector<std::array<double, 2>> block_sums_;
    std::vector<std::uint64_t> block_steps_;
};

struct LyapunovEstimate {
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    double se_plus = 0.0;
    double se_minus = 0.0;
    std::uint64_t steps = 0;
    int cadence = 0;
};

namespace detail {

/// Block-bootstrap standard errors for the per-step exponents.
inline std::array<double, 2> bootstrap_se(const std::vector<std::array<double, 2>>& sums,
                                          const std::vector<std::uint64_t>& steps,
                                          std::uint64_t seed) {
    std::vector<int> live;
    for (std::size_t b = 0; b < steps.size(); ++b)
        if (steps[b] > 0) live.push_back(static_cast<int>(b));
    if (live.size() < 2) return {0.0, 0.0};
    const int reps = 200;
    RngStream rng(derive_seed(seed, 0xb00d));
    std::array<double, 2> mean{}, var{};
    std::vector<std::array<double, 2>> draws(reps);
    for (int r = 0; r < reps; ++r) {
        double s0 = 0.0, s1 = 0.0, n = 0.0;
        for (std::size_t k = 0; k < live.size(); ++k) {
            const int b = live[rng.next_below(live.size())];
            s0 += sums[b][0];
            s1 += sums[b][1];
            n += static_cast<double>(steps[b]);
        }
        draws[r] = {s0 / n, s1 / n};
        mean[0] += draws[r][0] / reps;
        mean[1] += draws[r][1] / reps;
    }
    for (int r = 0; r < reps; ++r) {
        var[0] += (draws[r][0] - mean[0]) * (draws[r][0] - mean[0]) / (reps - 1);
        var[1] += (draws[r][1] - mean[1]) * (draws[r][1] - mean[1]) / (reps - 1);
    }
    return {std::sqrt(var[0]), std::sqrt(var[1])};
}

} // namespace detail

/// Lyapunov exponents of the derivative cocycle along a mu-walk confined to
/// the compact component. Frames are recomputed at every step; the cocycle is
/// QR-renormalized every `cadence` steps. Walks are refused outside the
/// compact box (EscapeError): escape rates are infinite there by design.
inline LyapunovEstimate estimate_lyapunov(const SurfaceParams<double>& sp,
                                          const SurfacePoint<double>& q,
                                          const StepDistribution& mu, std::uint64_t n,
                                          std::uint64_t seed, int cadence = 0,
                                          const NumericPolicy& pol = default_policy()) {
    if (cadence <= 0) cadence = pol.lyapunov_cadence;
    if (!in_compact_component(sp, q, pol))
        throw EscapeError("estimate_lyapunov: start point outside the compact box");

    QrCocycle cocycle(cadence, pol.lyapunov_blocks);
    SurfacePoint<double> p = q;
    TangentFrame<double> fp = tangent_frame(sp, p, pol);  // throws on singular starts
    const double guard = 2.0 + 1e-6;  // loose box guard for rounding drift

    for (std::uint64_t j = 0; j < n; ++j) {
        const Letter l = mu.letter_at(seed, j);
        const SurfacePoint<double> next = apply_letter(l, sp, p);
        if (sup_norm(next) > guard)
            throw EscapeError("estimate_lyapunov: walk left the compact box at step " +
                              std::to_string(j + 1));
        try {
            const TangentFrame<double> fn = tangent_frame(sp, next, pol);
            const Mat2<double> m = restricted_differential(l, sp, p, fp, fn, pol);
            cocycle.push(m, static_cast<int>(j * pol.lyapunov_blocks / n));
            p = next;
            fp = fn;
        } catch (const SingularPointError& e) {
            throw SingularPointError(std::string(e.what()) + " (aborted after " +
                                     std::to_string(j) + " of " + std::to_string(n) + " steps)");
        }
    }
    cocycle.finish();

    LyapunovEstimate est;
    est.steps = cocycle.steps();
    est.cadence = cadence;
    est.lambda_plus = cocycle.log_sum_top() / static_cast<double>(est.steps);
    est.lambda_minus = cocycle.log_sum_bot() / static_cast<double>(est.steps);
    const auto se = detail::bootstrap_se(cocycle.block_sums(), cocycle.block_steps(), seed);
    est.se_plus = se[0];
    est.se_minus = se[1];
    if (!(est.lambda_plus >= est.lambda_minus) || !std::isfinite(est.lambda_plus) ||
        !std::isfinite(est.lambda_minus))
        throw Error("estimate_lyapunov: exponent ordering violated");
    return est;
}

} // namespace vieta
