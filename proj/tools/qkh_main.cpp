// qkh — command-line front end for the quantized trap-shaking simulator.

#include <CLI11.hpp>

#include "qkh/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"qkh — quantum Kramers-Henneberger trap-shaking simulator"};
    app.require_subcommand(1);

    qkh::cli::RunOptions options;
    std::string command;

    const std::vector<std::string> names = {"simulate",     "compare-gauges", "effective-field",
                                            "optomech-map", "sweep",          "bath-design"};
    for (const auto& name : names) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", options.config_path, "run configuration file")->required();
        sub->add_option("--out", options.out_dir, "output directory");
        sub->add_option("--override", options.overrides,
                        "dot-path overrides, e.g. physics.drive.ell=0.02");
        sub->add_option("--parallel", options.parallel, "sweep parallelism degree");
        sub->callback([&command, name] { command = name; });
    }

    CLI11_PARSE(app, argc, argv);
    return qkh::cli::dispatch(command, options);
}
