#include <cinttypes>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "innerlab/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"innerlab: orbit statistics for forward compositions of inner functions"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = -1;
    std::uint64_t seed = 0;

    CLI::App* run = app.add_subcommand("run", "run an experiment configuration file");
    run->add_option("config", config_path, "path to a flat key = value config file")
        ->required();
    run->add_option("--out", out_dir,
                    std::string("output directory (overrides config and $") +
                        innerlab::kOutDirEnvVar + ")");
    run->add_option("--threads", threads,
                    "worker threads; affects speed only, never results");
    CLI::Option* seed_opt =
        run->add_option("--seed", seed, "override the seed from the config");

    app.add_subcommand("list-presets", "list presets and the claims they check");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("list-presets")) {
            std::fputs(innerlab::list_presets().c_str(), stdout);
            return 0;
        }

        innerlab::ExperimentConfig cfg = innerlab::ExperimentConfig::from_file(config_path);
        innerlab::RunOptions opt;
        opt.out_dir = out_dir;
        opt.threads = threads;
        if (seed_opt->count() > 0) {
            opt.override_seed = true;
            opt.seed = seed;
        }

        innerlab::RunOutcome outcome = innerlab::run_experiment(cfg, opt);
        for (const auto& c : outcome.criteria)
            std::printf("[%s] %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                        c.detail.c_str());
        std::printf("wrote %zu file(s); manifest: %s\n", outcome.files.size(),
                    outcome.manifest_path.c_str());
        return outcome.exit_code;
    } catch (const innerlab::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const innerlab::PrecisionExhausted& e) {
        std::fprintf(stderr, "precision exhausted at step %" PRId64 ": %s\n", e.step,
                     e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
