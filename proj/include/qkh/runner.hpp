// runner.hpp — CLI subcommand implementations: each loads a config, runs the
// requested experiment into an output directory, and writes a manifest that
// names every output file together with the resolved configuration hash.

#pragma once

#include <string>
#include <vector>

namespace qkh::cli {

struct RunOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    int parallel = 1;
};

void run_simulate(const RunOptions& options);
void run_compare_gauges(const RunOptions& options);
void run_effective_field(const RunOptions& options);
void run_optomech_map(const RunOptions& options);
void run_sweep(const RunOptions& options);
void run_bath_design(const RunOptions& options);

// Exit codes: 0 success, 2 validation, 3 numerical stability/accuracy,
// 4 truncation leakage, 1 anything else.
int dispatch(const std::string& command, const RunOptions& options);

}  // namespace qkh::cli
