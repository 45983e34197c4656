#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fspde/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fspde: Monte Carlo laboratory for a space-time fractional stochastic heat equation"};
    app.require_subcommand(1);

    std::string config_path;
    fspde::CliOptions opts;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string which = "all";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration file (JSON)")->required();
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--seed", seed, "override the base seed")->each([&](const std::string&) {
            seed_set = true;
        });
        sub->add_option("--threads", opts.threads, "worker thread cap");
    };

    CLI::App* constants = app.add_subcommand("constants", "print derived constants and envelopes");
    add_common(constants);
    CLI::App* kernel = app.add_subcommand("kernel", "build a kernel table, run identity checks, dump CSV");
    add_common(kernel);
    CLI::App* simulate = app.add_subcommand("simulate", "run an ensemble and write binary + summary files");
    add_common(simulate);
    CLI::App* verify = app.add_subcommand("verify", "run envelope verification studies");
    add_common(verify);
    verify->add_option("--which", which, "moments|tails|converge|all");

    CLI11_PARSE(app, argc, argv);

    return fspde::run_guarded([&]() -> int {
        const fspde::RunConfig cfg = fspde::load_config(config_path);
        if (seed_set) opts.seed_override = seed;
        if (constants->parsed()) return fspde::cmd_constants(cfg, opts);
        if (kernel->parsed()) return fspde::cmd_kernel(cfg, opts);
        if (simulate->parsed()) return fspde::cmd_simulate(cfg, opts);
        return fspde::cmd_verify(cfg, opts, which);
    });
}
