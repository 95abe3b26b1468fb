#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "pcps/linalg.hpp"
#include "pcps/sketch.hpp"

namespace pcps::cli {

enum class Command { sketch, verify, experiment, kmeans_demo };
enum class OutputFormat { json, csv };

struct RunConfig {
    Command command = Command::verify;
    std::string input;     // matrix file; empty when generating
    std::string generate;  // generator spec, e.g. "powerlaw:300x40:alpha=1.0"
    Index k = 2;
    double eps = 0.5;
    double delta = 0.1;
    Scheme scheme = Scheme::leverage_mixed;
    Index s = 0;  // 0: use the scheme's sample-size formula
    Index trials = 20;
    Index x_samples = 50;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string output;  // empty: write the report to `out`
    OutputFormat format = OutputFormat::json;
};

// Parses "name:RxC[:key=value...]" generator specs:
//   gaussian:100x20
//   powerlaw:300x40:alpha=1.0
//   lowrank:200x50:r=5:noise=0.01
//   mog:50x400:clusters=3:sep=5.0
Matrix generate_matrix(const std::string& spec, std::uint64_t seed);

// Executes the configured pipeline. Exit status: 0 success, 1 the verified
// guarantee failed (holds = false or a demo gap above its certificate),
// 2 input or parameter error.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);
int run(const RunConfig& config);

}  // namespace pcps::cli
