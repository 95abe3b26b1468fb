#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <string>

#include "pcps/cli.hpp"

namespace {

void add_common_options(CLI::App* cmd, pcps::cli::RunConfig& config, std::string& scheme,
                        std::string& format) {
    cmd->add_option("--input", config.input, "matrix file (.csv, .mtx)");
    cmd->add_option("--generate", config.generate,
                    "generator spec, e.g. gaussian:100x20, powerlaw:300x40:alpha=1.0, "
                    "lowrank:200x50:r=5:noise=0.01, mog:50x400:clusters=3:sep=5.0");
    cmd->add_option("--k", config.k, "target rank");
    cmd->add_option("--eps", config.eps, "accuracy parameter in (0, 1]");
    cmd->add_option("--delta", config.delta, "failure probability in (0, 1)");
    cmd->add_option("--scheme", scheme, "sampling scheme")
        ->check(CLI::IsMember({"uniform", "leverage", "ridge"}));
    cmd->add_option("--s", config.s, "sample-size override (0: use the scheme formula)");
    cmd->add_option("--trials", config.trials, "trial count for experiment pipelines");
    cmd->add_option("--x-samples", config.x_samples, "random test subspaces per check");
    cmd->add_option("--seed", config.seed, "master seed; all randomness derives from it");
    cmd->add_option("--threads", config.threads, "worker threads (output is thread-count invariant)");
    cmd->add_option("--output", config.output, "report file (default: stdout)");
    cmd->add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"projection-cost preserving sketches: construction and verification"};
    app.require_subcommand(1);

    pcps::cli::RunConfig config;
    std::string scheme = "leverage";
    std::string format = "json";

    auto* sketch = app.add_subcommand("sketch", "build a sampling plan (json) or probabilities (csv)");
    auto* verify = app.add_subcommand("verify", "evaluate the structural conditions and the sketch guarantee");
    auto* experiment = app.add_subcommand("experiment", "per-trial condition/cost records and error-vs-s curves");
    auto* kmeans = app.add_subcommand("kmeans-demo", "clustering-cost preservation demonstration");
    for (auto* cmd : {sketch, verify, experiment, kmeans})
        add_common_options(cmd, config, scheme, format);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    if (sketch->parsed()) config.command = pcps::cli::Command::sketch;
    if (verify->parsed()) config.command = pcps::cli::Command::verify;
    if (experiment->parsed()) config.command = pcps::cli::Command::experiment;
    if (kmeans->parsed()) config.command = pcps::cli::Command::kmeans_demo;

    try {
        config.scheme = pcps::scheme_from_string(scheme);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    config.format = format == "csv" ? pcps::cli::OutputFormat::csv : pcps::cli::OutputFormat::json;

    return pcps::cli::run(config);
}
