#include "sqmod/config.hpp"
#include "sqmod/experiments.hpp"
#include "sqmod/params.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitConfigError = 2;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sqmod: estimation of a weak amplitude-modulation index with "
                 "bright amplitude-squeezed light - closed-form theory, Monte Carlo "
                 "simulation, and inference drivers"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_path;
    std::string fit_kind;
    std::string fit_input;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int reps_override = -1;
    int threads_override = -1;

    app.add_option("--config", config_path, "key-value configuration file")->required();
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides run.seed)");
    app.add_option("--out", out_path, "output path (default: <command>.csv)");
    app.add_option("--reps", reps_override, "override run.reps");
    app.add_option("--threads", threads_override, "override run.threads (0 = auto)");

    auto* c_theory = app.add_subcommand("theory-fig1d", "Fisher information per photon vs RBW");
    auto* c_phi = app.add_subcommand("sweep-phi", "measured quantum advantage vs squeezing");
    auto* c_rbw = app.add_subcommand("sweep-rbw", "measured quantum advantage vs RBW, with var_h fit");
    auto* c_trace = app.add_subcommand("trace-fig2a", "time-domain spectra of modulated (anti)squeezed light");
    auto* c_validate = app.add_subcommand("validate", "run the invariant suite; nonzero exit on failure");
    auto* c_simulate = app.add_subcommand("simulate", "free-form variance experiment (variance-report CSV)");
    auto* c_fit = app.add_subcommand("fit", "run an inference fit over a previously written CSV");
    c_fit->add_option("--kind", fit_kind, "var-vs-phi | q-vs-rbw")->required();
    c_fit->add_option("--in", fit_input, "input CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }
    seed_given = seed_opt->count() > 0;

    try {
        sqmod::ExperimentConfig cfg = sqmod::load_config(config_path);
        if (seed_given) {
            cfg.seed = seed;
            cfg.has_seed = true;
        }
        if (!cfg.has_seed)
            throw sqmod::ConfigError("no seed: pass --seed or set run.seed in the config");
        if (reps_override >= 0) cfg.reps = reps_override;
        if (threads_override >= 0) cfg.threads = threads_override;

        auto out_or = [&](const char* fallback) {
            return out_path.empty() ? std::string(fallback) : out_path;
        };

        if (c_theory->parsed()) {
            sqmod::cmd_theory_fig1d(cfg, out_or("theory_fig1d.csv"));
        } else if (c_phi->parsed()) {
            sqmod::cmd_sweep_phi(cfg, out_or("sweep_phi.csv"));
        } else if (c_rbw->parsed()) {
            sqmod::cmd_sweep_rbw(cfg, out_or("sweep_rbw.csv"));
        } else if (c_trace->parsed()) {
            sqmod::cmd_trace_fig2a(cfg, out_or("trace_fig2a.csv"));
        } else if (c_simulate->parsed()) {
            sqmod::cmd_simulate(cfg, out_or("simulate.csv"));
        } else if (c_fit->parsed()) {
            sqmod::cmd_fit(cfg, fit_kind, fit_input, out_or("fit.json"));
        } else if (c_validate->parsed()) {
            return sqmod::cmd_validate(cfg, std::cout) == 0 ? kExitOk : kExitValidationFailure;
        }
        return kExitOk;
    } catch (const sqmod::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const sqmod::ParamError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidationFailure;
    }
}
