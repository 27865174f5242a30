#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vieta/config.hpp"
#include "vieta/json_io.hpp"
#include "vieta/version.hpp"

namespace vieta {

struct RunOutcome {
    int exit_code = 0;      // 0 ok, 1 numeric assertion failure, 2 config error
    std::string summary;    // human-readable summary, also written to disk
    std::vector<std::string> files;  // data files written, echoed in the manifest
};

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write " + p.string());
    f << content;
}

inline Json policy_json(const NumericPolicy& p) {
    return {{"on_surface_tol", p.on_surface_tol},
            {"grad_zero_tol", p.grad_zero_tol},
            {"box_tol", p.box_tol},
            {"trace_edge_tol", p.trace_edge_tol},
            {"discriminant_rel_tol", p.discriminant_rel_tol},
            {"frame_orth_tol", p.frame_orth_tol},
            {"frame_indep_tol", p.frame_indep_tol},
            {"frame_solve_tol", p.frame_solve_tol},
            {"newton_tol", p.newton_tol},
            {"newton_max_iter", p.newton_max_iter},
            {"newton_grid_radius", p.newton_grid_radius},
            {"newton_grid_points", p.newton_grid_points},
            {"dedup_dist", p.dedup_dist},
            {"chart_agree_rel_tol", p.chart_agree_rel_tol},
            {"chart_usable_frac", p.chart_usable_frac},
            {"orbit_match_tol", p.orbit_match_tol},
            {"orbit_collision_factor", p.orbit_collision_factor},
            {"prepass_grid", p.prepass_grid},
            {"prepass_probes", p.prepass_probes},
            {"envelope_safety", p.envelope_safety},
            {"envelope_bias_tol", p.envelope_bias_tol},
            {"area_floor", p.area_floor},
            {"escape_radius", p.escape_radius},
            {"lyapunov_cadence", p.lyapunov_cadence},
            {"lyapunov_blocks", p.lyapunov_blocks},
            {"moment_blocks", p.moment_blocks},
            {"chart_threshold", p.chart_threshold},
            {"chart_region", p.chart_region},
            {"graph_newton_tol", p.graph_newton_tol},
            {"graph_newton_max_iter", p.graph_newton_max_iter},
            {"shadow_noise_floor", p.shadow_noise_floor},
            {"calib_alpha_min", p.calib_alpha_min},
            {"calib_alpha_max", p.calib_alpha_max},
            {"calib_grid", p.calib_grid},
            {"backtrack_tol", p.backtrack_tol}};
}

inline Json manifest_json(const ExperimentConfig& cfg, double wall_seconds) {
    Json given;
    for (const auto& [k, v] : cfg.given) given[k] = v;
    Json m{{"version", kVersion},
           {"experiment", cfg.experiment},
           {"wall_seconds", wall_seconds},
           {"workers", cfg.workers},
           {"n", cfg.n},
           {"seeds", cfg.seeds},
           {"thin", cfg.thin},
           {"mu", {cfg.mu.px, cfg.mu.py, cfg.mu.pz}},
           {"given", given},
           {"policy", policy_json(cfg.policy)}};
    if (cfg.params || cfg.traces) {
        m["params"] = params_json(cfg.effective_params());
        m["params_from_traces"] = cfg.params_from_traces();
        if (cfg.traces)
            m["traces"] = {cfg.traces->a, cfg.traces->b, cfg.traces->c, cfg.traces->d};
    }
    if (cfg.start) m["start"] = point_json(*cfg.start);
    return m;
}

inline SurfacePoint<double> require_start(const ExperimentConfig& cfg) {
    if (!cfg.start) throw ConfigError("missing key 'start'");
    return *cfg.start;
}

} // namespace detail

inline RunOutcome run_walk(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    const SurfaceParams<double> sp = cfg.effective_params();
    const SurfacePoint<double> q = detail::require_start(cfg);

    std::string jsonl = "{\"type\":\"header\",\"params\":" + params_json(sp).dump() +
                        ",\"start\":" + point_json(q).dump() + ",\"n\":" + std::to_string(cfg.n) +
                        ",\"thin\":" + std::to_string(cfg.thin) + "}\n";
    Json per_seed = Json::array();
    std::string text;
    for (std::uint64_t seed : cfg.seeds) {
        const TrajectoryRecord rec = run_trajectory(sp, q, cfg.mu, cfg.n, seed, cfg.thin,
                                                    cfg.policy);
        jsonl += trajectory_line(rec) + "\n";
        const EmpiricalSummary es = empirical_summary(rec);

        // distinct recorded points, capped; finite orbits stay well below it
        std::vector<SurfacePoint<double>> distinct;
        for (const SurfacePoint<double>& p : rec.samples) {
            bool known = false;
            for (const SurfacePoint<double>& d : distinct)
                if (sup_norm(p - d) <= 1e-9) {
                    known = true;
                    break;
                }
            if (!known && distinct.size() < 4096) distinct.push_back(p);
        }

        per_seed.push_back({{"seed", seed},
                            {"steps", rec.steps_taken},
                            {"escaped", rec.escaped},
                            {"first_escape_step", rec.first_escape_step},
                            {"distinct_points", distinct.size()},
                            {"box_fraction", es.box_fraction},
                            {"ball_fraction",
                             {es.ball_fraction[0], es.ball_fraction[1], es.ball_fraction[2]}},
                            {"moments", moments_json(es.moments)}});
        text += "seed " + std::to_string(seed) + ": steps " + std::to_string(rec.steps_taken) +
                (rec.escaped ? " escaped at " + std::to_string(rec.first_escape_step)
                             : " bounded") +
                ", distinct points " + std::to_string(distinct.size()) + ", box fraction " +
                fmt17(es.box_fraction) + "\n";
    }
    detail::write_file(dir / "trajectories.jsonl", jsonl);
    detail::write_file(dir / "summary.json", Json{{"runs", per_seed}}.dump(2) + "\n");
    return {0, text, {"trajectories.jsonl", "summary.json"}};
}

inline RunOutcome run_lyapunov(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    const SurfaceParams<double> sp = cfg.effective_params();
    const SurfacePoint<double> q = detail::require_start(cfg);
    Json per_seed = Json::array();
    std::string text;
    for (std::uint64_t seed : cfg.seeds) {
        const LyapunovEstimate est =
            estimate_lyapunov(sp, q, cfg.mu, cfg.n, seed, cfg.cadence, cfg.policy);
        Json j = lyapunov_json(est);
        j["seed"] = seed;
        per_seed.push_back(j);
        text += "seed " + std::to_string(seed) + ": lambda+ " + fmt17(est.lambda_plus) + " +- " +
                fmt17(est.se_plus) + ", lambda- " + fmt17(est.lambda_minus) + " +- " +
                fmt17(est.se_minus) + ", sum " + fmt17(est.lambda_plus + est.lambda_minus) + "\n";
    }
    detail::write_file(dir / "lyapunov.json", Json{{"runs", per_seed}}.dump(2) + "\n");
    return {0, text, {"lyapunov.json"}};
}

inline RunOutcome run_symplectic(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    const SurfaceParams<double> sp = cfg.effective_params();
    Json per_seed = Json::array();
    std::string text;
    std::vector<std::string> files;
    for (std::uint64_t seed : cfg.seeds) {
        const SymplecticSample s =
            sample_symplectic(sp, cfg.n, seed, cfg.policy, cfg.workers);
        std::string jsonl =
            "{\"type\":\"header\",\"params\":" + params_json(sp).dump() +
            ",\"seed\":" + std::to_string(seed) + ",\"n\":" + std::to_string(cfg.n) +
            ",\"acceptance_rate\":" + fmt17(s.acceptance_rate) +
            ",\"total_area\":" + fmt17(s.total_area) + ",\"total_area_se\":" +
            fmt17(s.total_area_se) + ",\"violations\":" + std::to_string(s.violations) +
            ",\"clipped_mass_rel\":" + fmt17(s.clipped_mass_rel) + "}\n";
        for (const SurfacePoint<double>& p : s.points) jsonl += point_line(p) + "\n";
        files.push_back("sample_" + std::to_string(seed) + ".jsonl");
        detail::write_file(dir / files.back(), jsonl);

        const MomentVector m = symplectic_moments(s);
        per_seed.push_back({{"seed", seed},
                            {"total_area", s.total_area},
                            {"total_area_se", s.total_area_se},
                            {"acceptance_rate", s.acceptance_rate},
                            {"violations", s.violations},
                            {"clipped_mass_rel", s.clipped_mass_rel},
                            {"surface_singular", s.surface_singular},
                            {"moments", moments_json(m)}});
        text += "seed " + std::to_string(seed) + ": area " + fmt17(s.total_area) + " +- " +
                fmt17(s.total_area_se) + ", acceptance " + fmt17(s.acceptance_rate) + "\n";
        if (s.total_area < cfg.policy.area_floor) {
            text += "warning: total area below area_floor; compact component may be a point\n";
        }
    }
    detail::write_file(dir / "summary.json", Json{{"runs", per_seed}}.dump(2) + "\n");
    files.push_back("summary.json");
    return {0, text, files};
}

inline RunOutcome run_orbit(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    const SurfaceParams<double> sp = cfg.effective_params();
    const SurfacePoint<double> q = detail::require_start(cfg);
    Json j;
    std::string text;
    if (cfg.rational) {
        const SurfaceParams<Rational> rp{Rational(sp.A), Rational(sp.B), Rational(sp.C),
                                         Rational(sp.D)};
        const SurfacePoint<Rational> rq{Rational(q.x), Rational(q.y), Rational(q.z)};
        const OrbitResult<Rational> r = orbit_closure(rp, rq, cfg.cap, cfg.tol);
        j = orbit_json(rp, r);
        text = r.finite ? "finite orbit with " + std::to_string(r.points.size()) + " points\n"
                        : "exceeded cap " + std::to_string(cfg.cap) + " (frontier " +
                              std::to_string(r.frontier_size) + ")\n";
    } else {
        const OrbitResult<double> r = orbit_closure(sp, q, cfg.cap, cfg.tol);
        j = orbit_json(sp, r);
        text = r.finite ? "finite orbit with " + std::to_string(r.points.size()) + " points\n"
                        : "exceeded cap " + std::to_string(cfg.cap) + " (frontier " +
                              std::to_string(r.frontier_size) + ")\n";
    }
    detail::write_file(dir / "orbit.json", j.dump(2) + "\n");
    return {0, text, {"orbit.json"}};
}

inline RunOutcome run_infinity_verify(const ExperimentConfig& cfg,
                                      const std::filesystem::path& dir) {
    const SurfaceParams<double> sp =
        cfg.params || cfg.traces ? cfg.effective_params() : SurfaceParams<double>{1, 1, 1, 0};
    const ShadowCalibration cal = calibrate_shadow(sp, cfg.policy);
    const GrowthReport rep = verify_growth_lemmas(cfg.max_len, cfg.grid, cal.C_cal, cal.R_cal,
                                                  cfg.trials, cfg.seeds.front());
    Json j = growth_report_json(rep);
    j["calibration"] = {{"C_cal", cal.C_cal},
                        {"C_l1", cal.C_l1},
                        {"R_cal", cal.R_cal},
                        {"samples", cal.samples}};
    detail::write_file(dir / "growth_report.json", j.dump(2) + "\n");

    std::string csv = "check,worst_slack\n";
    csv += "single_step," + fmt17(rep.worst_single_step_slack) + "\n";
    csv += "perturbed," + fmt17(rep.worst_perturbed_slack) + "\n";
    detail::write_file(dir / "worst_slacks.csv", csv);

    const std::string text =
        std::to_string(rep.violations.size()) + " violations (" +
        std::to_string(rep.words_checked) + " words, C_cal " + fmt17(cal.C_cal) + ", R_cal " +
        fmt17(cal.R_cal) + ")\n";
    return {rep.ok() ? 0 : 1, text, {"growth_report.json", "worst_slacks.csv"}};
}

inline RunOutcome run_boundary(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    std::string text;
    Json per_seed = Json::array();
    std::vector<std::string> files;
    for (std::uint64_t seed : cfg.seeds) {
        NormalizedProduct np;
        std::string csv = "n,angle,defect,lognorm\n";
        const std::uint64_t stride = std::max<std::uint64_t>(1, cfg.thin);
        for (std::uint64_t i = 0; i < cfg.n; ++i) {
            push_letter(np, cfg.mu.letter_at(seed, i));
            if ((i + 1) % stride == 0 || i + 1 == cfg.n) {
                const FurstenbergDirection d = direction_of(np);
                csv += std::to_string(i + 1) + "," + fmt17(d.angle) + "," + fmt17(d.defect) +
                       "," + fmt17(d.log_norm) + "\n";
            }
        }
        files.push_back("boundary_" + std::to_string(seed) + ".csv");
        detail::write_file(dir / files.back(), csv);
        const FurstenbergDirection d = direction_of(np);
        const InitialLetterResult init = initial_letter(
            [&](std::size_t i) { return cfg.mu.letter_at(seed, i); }, cfg.n);
        per_seed.push_back({{"seed", seed},
                            {"angle", d.angle},
                            {"defect", d.defect},
                            {"log_norm", d.log_norm},
                            {"initial_letter", std::string(1, letter_char(init.letter))},
                            {"stabilization_index", init.stabilization_index}});
        text += "seed " + std::to_string(seed) + ": angle " + fmt17(d.angle) + ", defect " +
                fmt17(d.defect) + ", initial letter " +
                std::string(1, letter_char(init.letter)) + "\n";
    }
    detail::write_file(dir / "summary.json", Json{{"runs", per_seed}}.dump(2) + "\n");
    files.push_back("summary.json");
    return {0, text, files};
}

inline RunOutcome run_catalog_check(const ExperimentConfig& cfg,
                                    const std::filesystem::path& dir) {
    Json checks = Json::array();
    int failures = 0;
    auto record = [&](const std::string& name, bool ok, const std::string& note = "") {
        checks.push_back({{"check", name}, {"ok", ok}, {"note", note}});
        if (!ok) ++failures;
    };

    try {
        const BoalchKleinOrbit bk = boalch_klein();
        record("boalch_klein", true, "7 points, trace witness verified");
        (void)bk;
    } catch (const Error& e) {
        record("boalch_klein", false, e.what());
    }
    try {
        origin_differentials();
        record("origin_differentials", true, "chain rule matches the catalog");
    } catch (const Error& e) {
        record("origin_differentials", false, e.what());
    }
    try {
        const SurfacePoint<double> p = cayley_rational_point(1, 3, 1, 3);
        record("cayley_rational_point", sup_norm(p - SurfacePoint<double>{1, 1, 1}) < 1e-12);
    } catch (const Error& e) {
        record("cayley_rational_point", false, e.what());
    }
    try {
        short_orbit_length2(1, -1);
        short_orbit_length2(2, 3);
        record("short_orbit_length2", true);
    } catch (const Error& e) {
        record("short_orbit_length2", false, e.what());
    }
    try {
        const SurfaceParams<Rational> rp{0, 0, 0, 4};
        const OrbitResult<Rational> r = orbit_closure(rp, SurfacePoint<Rational>{1, 1, 1}, 16);
        record("cayley_orbit_closure", r.finite && r.points.size() == 4);
    } catch (const Error& e) {
        record("cayley_orbit_closure", false, e.what());
    }
    try {
        bool ok = true;
        for (double x0 : {0.0, 0.5, -1.3, 1.9}) {
            const FiberRotation r =
                fiber_rotation_matrix(cfg.params ? *cfg.params : SurfaceParams<double>{1, 1, 1, 0},
                                      x0);
            ok = ok && std::abs(r.linear.det() - 1.0) <= 1e-12;
        }
        record("fiber_rotation_matrix", ok);
    } catch (const Error& e) {
        record("fiber_rotation_matrix", false, e.what());
    }

    detail::write_file(dir / "summary.json",
                       Json{{"checks", checks}, {"failures", failures}}.dump(2) + "\n");
    std::string text;
    for (const Json& c : checks)
        text += std::string(c["ok"].get<bool>() ? "pass" : "FAIL") + "  " +
                c["check"].get<std::string>() + "\n";
    return {failures == 0 ? 0 : 1, text, {"summary.json"}};
}

/// Executes the named experiment, writing manifest, data files and a
/// human-readable summary under cfg.out. Exit code 0 on success, 1 when a
/// module-level assertion failed (witness attached to the summary).
inline RunOutcome run(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::filesystem::path dir = cfg.out;
    std::filesystem::create_directories(dir);

    RunOutcome out;
    try {
        if (cfg.experiment == "walk")
            out = run_walk(cfg, dir);
        else if (cfg.experiment == "lyapunov")
            out = run_lyapunov(cfg, dir);
        else if (cfg.experiment == "symplectic")
            out = run_symplectic(cfg, dir);
        else if (cfg.experiment == "orbit")
            out = run_orbit(cfg, dir);
        else if (cfg.experiment == "infinity-verify")
            out = run_infinity_verify(cfg, dir);
        else if (cfg.experiment == "boundary")
            out = run_boundary(cfg, dir);
        else if (cfg.experiment == "catalog-check")
            out = run_catalog_check(cfg, dir);
        else
            throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        out.exit_code = 1;
        out.summary = std::string("numeric assertion failure: ") + e.what() + "\n";
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Json manifest = detail::manifest_json(cfg, wall);
    manifest["files"] = out.files;
    detail::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    detail::write_file(dir / "summary.txt", out.summary);
    return out;
}

} // namespace vieta
