#pragma once

#include <cstddef>

namespace vieta {

/// Every numeric tolerance and algorithmic knob used by the library, in one
/// injectable record. All defaults are part of the library contract; callers
/// override fields rather than passing loose epsilons around.
struct NumericPolicy {
    // surface / point classification
    double on_surface_tol = 1e-9;      // |F(p)| below this counts as on-surface
    double grad_zero_tol = 1e-8;       // gradient norm below this is "singular point"
    double box_tol = 1e-9;             // slack for the [-2,2]^3 compact-component box
    double trace_edge_tol = 1e-12;     // |t| == 2 detection for singular traces
    double discriminant_rel_tol = 1e-10;

    // tangent frames
    double frame_orth_tol = 1e-10;     // |g.e| <= tol * |g| * |e|
    double frame_indep_tol = 1e-8;     // smallest singular value of the 3x2 frame
    double frame_solve_tol = 1e-8;     // residual of the restricted-differential solve

    // singular-point search
    double newton_tol = 1e-12;
    int newton_max_iter = 60;
    double newton_grid_radius = 6.0;
    int newton_grid_points = 11;       // per axis
    double dedup_dist = 1e-6;

    // area form
    double chart_agree_rel_tol = 1e-8; // cross-chart agreement when both usable
    double chart_usable_frac = 0.1;    // denominator >= frac * max to cross-check

    // orbits
    double orbit_match_tol = 1e-8;
    double orbit_collision_factor = 10.0;

    // symplectic sampler
    int prepass_grid = 200;            // cells per axis in the envelope prepass
    int prepass_probes = 5;            // probes per axis inside each cell
    double envelope_safety = 0.8;      // multiplies the prepass density-floor estimate
    double envelope_bias_tol = 1e-3;   // max tolerated clipped relative mass (singular surfaces)
    double area_floor = 1e-6;          // total area below this counts as "no component"

    // walks
    double escape_radius = 1e8;
    int lyapunov_cadence = 8;
    int lyapunov_blocks = 20;
    int moment_blocks = 20;

    // charts at infinity
    double chart_threshold = 10.0;     // min affine sup-norm before a chart applies
    double chart_region = 0.3;         // |u|,|v| bound for graph_height / transitions
    double graph_newton_tol = 1e-14;
    int graph_newton_max_iter = 30;
    double shadow_noise_floor = 1e-9;  // additive floor on shadow-tracking tolerances

    // calibration of the monomial-shadow constants; the lower edge keeps
    // exp(-alpha) inside the chart_region
    double calib_alpha_min = 1.3;
    double calib_alpha_max = 6.3;
    int calib_grid = 12;               // alpha/beta grid per axis
    double backtrack_tol = 1e-10;      // revisit check in escape certificates, scaled by
                                       // the largest magnitude seen in the excursion
};

inline const NumericPolicy& default_policy() {
    static const NumericPolicy p{};
    return p;
}

} // namespace vieta
