#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "vieta/experiments.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw vieta::ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random dynamics on the cubic surfaces x^2+y^2+z^2+xyz = Ax+By+Cz+D"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    long long seed_override = -1;

    const std::vector<std::string> kinds{"walk",   "lyapunov",        "symplectic",
                                         "orbit",  "infinity-verify", "boundary",
                                         "catalog-check"};
    for (const std::string& kind : kinds) {
        CLI::App* sub = app.add_subcommand(kind, kind + " experiment");
        sub->add_option("--config", config_path, "flat key=value experiment file")->required();
        sub->add_option("--seed", seed_override, "replace the config's seed list");
        sub->add_option("--out", out_override, "output directory override");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string kind = app.get_subcommands().front()->get_name();

    try {
        std::string text = read_file(config_path);

        // the numeric policy file named by VIETA_POLICY prepends its
        // policy.* lines to every config
        if (const char* policy_path = std::getenv("VIETA_POLICY")) {
            text = read_file(policy_path) + "\n" + text;
        }

        vieta::ExperimentConfig cfg = vieta::parse_config(text);
        if (cfg.experiment != kind)
            throw vieta::ConfigError("config names experiment '" + cfg.experiment +
                                     "' but the subcommand is '" + kind + "'");
        if (seed_override >= 0)
            cfg.seeds = {static_cast<std::uint64_t>(seed_override)};
        if (!out_override.empty()) cfg.out = out_override;

        const vieta::RunOutcome outcome = vieta::run(cfg);
        std::fputs(outcome.summary.c_str(), stdout);
        return outcome.exit_code;
    } catch (const vieta::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const vieta::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
