#pragma once

#include <string>
#include <vector>

// Command-line surface. Subcommands: synth, prepare, train, extract,
// svm-train, eval, grid-nn, grid-svm, heatmap. Exit codes: 0 success,
// 1 usage error, 2 data error, 3 runtime failure.

namespace relnet::cli {

int run_command(const std::vector<std::string>& args);

}  // namespace relnet::cli
