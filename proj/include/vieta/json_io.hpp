#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "vieta/boundary.hpp"
#include "vieta/escape.hpp"
#include "vieta/growth.hpp"
#include "vieta/orbits.hpp"
#include "vieta/symplectic.hpp"
#include "vieta/walk.hpp"

namespace vieta {

using Json = nlohmann::json;

/// Floating values cross file boundaries with 17 significant digits.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline Json scalar_json(double v) { return Json::array({v, 0.0}); }
inline Json scalar_json(const Cplx& v) { return Json::array({v.real(), v.imag()}); }

inline double scalar_from_json_real(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2) {
        if (j[1].get<double>() != 0.0) throw Error("expected a real scalar");
        return j[0].get<double>();
    }
    throw Error("malformed scalar: expected number or [re, im]");
}

inline Cplx scalar_from_json(const Json& j) {
    if (j.is_number()) return Cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2) return Cplx(j[0].get<double>(), j[1].get<double>());
    throw Error("malformed scalar: expected number or [re, im]");
}

template <FloatScalar S>
Json params_json(const SurfaceParams<S>& sp) {
    return {{"A", scalar_json(sp.A)},
            {"B", scalar_json(sp.B)},
            {"C", scalar_json(sp.C)},
            {"D", scalar_json(sp.D)}};
}

inline SurfaceParams<double> params_from_json(const Json& j) {
    return {scalar_from_json_real(j.at("A")), scalar_from_json_real(j.at("B")),
            scalar_from_json_real(j.at("C")), scalar_from_json_real(j.at("D"))};
}

inline SurfaceParams<Cplx> cparams_from_json(const Json& j) {
    return {scalar_from_json(j.at("A")), scalar_from_json(j.at("B")),
            scalar_from_json(j.at("C")), scalar_from_json(j.at("D"))};
}

template <FloatScalar S>
Json point_json(const SurfacePoint<S>& p) {
    return {{"x", scalar_json(p.x)}, {"y", scalar_json(p.y)}, {"z", scalar_json(p.z)}};
}

inline SurfacePoint<double> point_from_json(const Json& j) {
    return {scalar_from_json_real(j.at("x")), scalar_from_json_real(j.at("y")),
            scalar_from_json_real(j.at("z"))};
}

inline SurfacePoint<Cplx> cpoint_from_json(const Json& j) {
    return {scalar_from_json(j.at("x")), scalar_from_json(j.at("y")),
            scalar_from_json(j.at("z"))};
}

/// One JSONL line for a point: full 17-digit precision, fixed field order.
inline std::string point_line(const SurfacePoint<double>& p) {
    return "{\"x\":[" + fmt17(p.x) + ",0],\"y\":[" + fmt17(p.y) + ",0],\"z\":[" + fmt17(p.z) +
           ",0]}";
}

inline std::string fmt_digest(std::uint64_t d) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(d));
    return buf;
}

inline std::string trajectory_line(const TrajectoryRecord& rec) {
    std::string s = "{\"seed\":" + std::to_string(rec.seed) +
                    ",\"steps\":" + std::to_string(rec.steps_taken) +
                    ",\"escaped\":" + (rec.escaped ? "true" : "false") +
                    ",\"first_escape_step\":" + std::to_string(rec.first_escape_step) +
                    ",\"letters_digest\":\"" + fmt_digest(rec.letters_digest) +
                    "\",\"max_log_norm\":" + fmt17(rec.max_log_norm) + ",\"samples\":[";
    for (std::size_t i = 0; i < rec.samples.size(); ++i) {
        if (i) s += ',';
        const SurfacePoint<double>& p = rec.samples[i];
        s += '[' + fmt17(p.x) + ',' + fmt17(p.y) + ',' + fmt17(p.z) + ']';
    }
    s += "]}";
    return s;
}

inline Json moments_json(const MomentVector& m) {
    static const char* names[9] = {"x", "y", "z", "xx", "yy", "zz", "xy", "yz", "zx"};
    Json mean, se;
    for (int i = 0; i < 9; ++i) {
        mean[names[i]] = m.mean[i];
        se[names[i]] = m.se[i];
    }
    return {{"n", m.n}, {"mean", mean}, {"se", se}};
}

inline Json lyapunov_json(const LyapunovEstimate& l) {
    return {{"lambda_plus", l.lambda_plus}, {"lambda_minus", l.lambda_minus},
            {"se_plus", l.se_plus},         {"se_minus", l.se_minus},
            {"steps", l.steps},             {"cadence", l.cadence}};
}

inline Json certificate_json(const EscapeCertificate& c) {
    Json steps = Json::array();
    for (const CertStep& s : c.trace)
        steps.push_back({{"step", s.step},
                         {"kind", std::string(1, s.kind)},
                         {"chart", chart_name(s.chart)},
                         {"alpha", s.alpha},
                         {"beta", s.beta},
                         {"growth_slack", s.growth_slack},
                         {"shadow_err", s.shadow_err},
                         {"shadow_allow", s.shadow_allow}});
    return {{"valid", c.valid},
            {"failure", c.failure},
            {"entry_step", c.entry_step},
            {"end_step", c.end_step},
            {"extends", c.extends},
            {"backtracks", c.backtracks},
            {"resets", c.resets},
            {"min_growth_slack", c.valid ? c.min_growth_slack : 0.0},
            {"max_shadow_err", c.max_shadow_err},
            {"C_cal", c.calibration.C_cal},
            {"R_cal", c.calibration.R_cal},
            {"itinerary", steps}};
}

inline Json growth_report_json(const GrowthReport& r) {
    Json violations = Json::array();
    for (const GrowthViolation& v : r.violations)
        violations.push_back({{"lemma", v.lemma},
                              {"word", v.word},
                              {"alpha", v.alpha0},
                              {"beta", v.beta0},
                              {"step", v.step},
                              {"value", v.value}});
    return {{"max_len", r.max_len},
            {"C", r.C},
            {"R", r.R},
            {"words_checked", r.words_checked},
            {"single_step_checks", r.single_step_checks},
            {"prefix_checks", r.prefix_checks},
            {"stalled_orbits", r.stalled_orbits},
            {"perturbed_trials", r.perturbed_trials},
            {"worst_single_step_slack", r.worst_single_step_slack},
            {"worst_perturbed_slack", r.worst_perturbed_slack},
            {"violations", violations}};
}

/// Orbit export: params, points (exact rational strings when available), and
/// the letter-labeled visit graph.
template <Scalar S>
Json orbit_json(const SurfaceParams<S>& sp, const OrbitResult<S>& r) {
    Json points = Json::array();
    for (const SurfacePoint<S>& p : r.points) {
        if constexpr (scalar_traits<S>::is_exact) {
            points.push_back({p.x.str(), p.y.str(), p.z.str()});
        } else {
            points.push_back({p.x, p.y, p.z});
        }
    }
    Json edges = Json::array();
    for (const OrbitEdge& e : r.edges)
        edges.push_back({{"from", e.from}, {"letter", std::string(1, letter_char(e.letter))},
                         {"to", e.to}});
    Json params;
    if constexpr (scalar_traits<S>::is_exact) {
        params = {{"A", sp.A.str()}, {"B", sp.B.str()}, {"C", sp.C.str()}, {"D", sp.D.str()}};
    } else {
        params = params_json(sp);
    }
    return {{"params", params},
            {"finite", r.finite},
            {"cap", r.cap},
            {"frontier_size", r.frontier_size},
            {"points", points},
            {"edges", edges}};
}

} // namespace vieta
