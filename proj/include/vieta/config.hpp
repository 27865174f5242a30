#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vieta/errors.hpp"
#include "vieta/growth.hpp"
#include "vieta/policy.hpp"
#include "vieta/surface.hpp"
#include "vieta/walk.hpp"

namespace vieta {

/// One experiment, described by a flat key = value document. Unknown keys
/// are hard errors; traces take precedence over params.
struct ExperimentConfig {
    std::string experiment;  // walk | lyapunov | symplectic | orbit |
                             // infinity-verify | boundary | catalog-check
    std::optional<SurfaceParams<double>> params;
    std::optional<TraceParams<double>> traces;
    std::optional<SurfacePoint<double>> start;
    StepDistribution mu = StepDistribution::uniform();
    std::uint64_t n = 100000;
    std::vector<std::uint64_t> seeds{0};
    int thin = 1;
    int workers = 1;
    std::string out = "out";

    // infinity-verify
    int max_len = 12;
    GridSpec grid{};
    int trials = 1000;

    // lyapunov
    int cadence = 0;  // 0: policy default

    // orbit
    std::size_t cap = 10000;
    double tol = 1e-8;
    bool rational = false;

    NumericPolicy policy{};

    /// Every key the document set explicitly (for the manifest echo).
    std::map<std::string, std::string> given;

    SurfaceParams<double> effective_params() const {
        if (traces) return pi_map(*traces);
        if (params) return *params;
        throw ConfigError("params or traces required");
    }
    bool params_from_traces() const { return traces.has_value(); }
};

namespace detail {

inline std::vector<double> parse_reals(const std::string& v, std::size_t want, int line) {
    std::istringstream ss(v);
    std::vector<double> out;
    double x;
    while (ss >> x) out.push_back(x);
    if (!ss.eof() || out.size() != want)
        throw ConfigError(line, "expected " + std::to_string(want) + " numbers, got '" + v + "'");
    return out;
}

inline bool apply_policy_key(NumericPolicy& pol, const std::string& key, double value) {
    static const std::map<std::string, double NumericPolicy::*> doubles{
        {"on_surface_tol", &NumericPolicy::on_surface_tol},
        {"grad_zero_tol", &NumericPolicy::grad_zero_tol},
        {"box_tol", &NumericPolicy::box_tol},
        {"escape_radius", &NumericPolicy::escape_radius},
        {"envelope_safety", &NumericPolicy::envelope_safety},
        {"envelope_bias_tol", &NumericPolicy::envelope_bias_tol},
        {"chart_threshold", &NumericPolicy::chart_threshold},
        {"chart_region", &NumericPolicy::chart_region},
        {"dedup_dist", &NumericPolicy::dedup_dist},
        {"orbit_match_tol", &NumericPolicy::orbit_match_tol},
        {"newton_grid_radius", &NumericPolicy::newton_grid_radius},
        {"calib_alpha_min", &NumericPolicy::calib_alpha_min},
        {"calib_alpha_max", &NumericPolicy::calib_alpha_max},
        {"backtrack_tol", &NumericPolicy::backtrack_tol},
        {"shadow_noise_floor", &NumericPolicy::shadow_noise_floor},
        {"area_floor", &NumericPolicy::area_floor},
    };
    static const std::map<std::string, int NumericPolicy::*> ints{
        {"prepass_grid", &NumericPolicy::prepass_grid},
        {"prepass_probes", &NumericPolicy::prepass_probes},
        {"lyapunov_cadence", &NumericPolicy::lyapunov_cadence},
        {"lyapunov_blocks", &NumericPolicy::lyapunov_blocks},
        {"moment_blocks", &NumericPolicy::moment_blocks},
        {"newton_grid_points", &NumericPolicy::newton_grid_points},
        {"calib_grid", &NumericPolicy::calib_grid},
    };
    if (auto it = doubles.find(key); it != doubles.end()) {
        pol.*(it->second) = value;
        return true;
    }
    if (auto it = ints.find(key); it != ints.end()) {
        pol.*(it->second) = static_cast<int>(value);
        return true;
    }
    return false;
}

} // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line = 0;

    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        std::string s = hash == std::string::npos ? raw : raw.substr(0, hash);
        const auto trim = [](std::string& t) {
            const auto b = t.find_first_not_of(" \t\r");
            const auto e = t.find_last_not_of(" \t\r");
            t = b == std::string::npos ? "" : t.substr(b, e - b + 1);
        };
        trim(s);
        if (s.empty()) continue;
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(line, "expected key = value");
        std::string key = s.substr(0, eq), value = s.substr(eq + 1);
        trim(key);
        trim(value);
        if (key.empty() || value.empty()) throw ConfigError(line, "empty key or value");
        if (cfg.given.count(key)) throw ConfigError(line, "duplicate key '" + key + "'");
        cfg.given[key] = value;

        if (key == "experiment") {
            cfg.experiment = value;
        } else if (key == "params") {
            const auto v = detail::parse_reals(value, 4, line);
            cfg.params = SurfaceParams<double>{v[0], v[1], v[2], v[3]};
        } else if (key == "traces") {
            const auto v = detail::parse_reals(value, 4, line);
            cfg.traces = TraceParams<double>{v[0], v[1], v[2], v[3]};
        } else if (key == "start") {
            const auto v = detail::parse_reals(value, 3, line);
            cfg.start = SurfacePoint<double>{v[0], v[1], v[2]};
        } else if (key == "mu") {
            const auto v = detail::parse_reals(value, 3, line);
            try {
                cfg.mu = StepDistribution(v[0], v[1], v[2]);
            } catch (const Error& e) {
                throw ConfigError(line, std::string("mu: ") + e.what());
            }
        } else if (key == "n") {
            cfg.n = static_cast<std::uint64_t>(detail::parse_reals(value, 1, line)[0]);
        } else if (key == "seeds") {
            cfg.seeds.clear();
            const std::size_t dots = value.find("..");
            if (dots != std::string::npos) {
                const std::uint64_t lo = std::stoull(value.substr(0, dots));
                const std::uint64_t hi = std::stoull(value.substr(dots + 2));
                if (hi < lo) throw ConfigError(line, "seed range is empty");
                for (std::uint64_t s2 = lo; s2 <= hi; ++s2) cfg.seeds.push_back(s2);
            } else {
                std::istringstream ss(value);
                std::uint64_t s2;
                while (ss >> s2) cfg.seeds.push_back(s2);
                if (!ss.eof()) throw ConfigError(line, "malformed seed list");
            }
            if (cfg.seeds.empty()) throw ConfigError(line, "seeds must be nonempty");
        } else if (key == "thin") {
            cfg.thin = static_cast<int>(detail::parse_reals(value, 1, line)[0]);
            if (cfg.thin < 1) throw ConfigError(line, "thin must be >= 1");
        } else if (key == "workers") {
            cfg.workers = static_cast<int>(detail::parse_reals(value, 1, line)[0]);
            if (cfg.workers < 1) throw ConfigError(line, "workers must be >= 1");
        } else if (key == "out") {
            cfg.out = value;
        } else if (key == "max_len") {
            cfg.max_len = static_cast<int>(detail::parse_reals(value, 1, line)[0]);
        } else if (key == "grid_lo") {
            cfg.grid.lo = detail::parse_reals(value, 1, line)[0];
        } else if (key == "grid_hi") {
            cfg.grid.hi = detail::parse_reals(value, 1, line)[0];
        } else if (key == "grid_step") {
            cfg.grid.step = detail::parse_reals(value, 1, line)[0];
        } else if (key == "trials") {
            cfg.trials = static_cast<int>(detail::parse_reals(value, 1, line)[0]);
        } else if (key == "cadence") {
            cfg.cadence = static_cast<int>(detail::parse_reals(value, 1, line)[0]);
        } else if (key == "cap") {
            cfg.cap = static_cast<std::size_t>(detail::parse_reals(value, 1, line)[0]);
        } else if (key == "tol") {
            cfg.tol = detail::parse_reals(value, 1, line)[0];
        } else if (key == "rational") {
            if (value == "true")
                cfg.rational = true;
            else if (value == "false")
                cfg.rational = false;
            else
                throw ConfigError(line, "rational must be true or false");
        } else if (key.rfind("policy.", 0) == 0) {
            const std::string field = key.substr(7);
            const double v = detail::parse_reals(value, 1, line)[0];
            if (!detail::apply_policy_key(cfg.policy, field, v))
                throw ConfigError(line, "unknown policy field '" + field + "'");
        } else {
            throw ConfigError(line, "unknown key '" + key + "'");
        }
    }

    static const std::vector<std::string> kinds{"walk",   "lyapunov",        "symplectic",
                                               "orbit",  "infinity-verify", "boundary",
                                               "catalog-check"};
    if (cfg.experiment.empty()) throw ConfigError("missing key 'experiment'");
    bool known = false;
    for (const std::string& k : kinds) known = known || k == cfg.experiment;
    if (!known) throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    return cfg;
}

} // namespace vieta
