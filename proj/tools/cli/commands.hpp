#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace opplab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitAnomaly = 2;

// Runs one experiment and writes its report; returns the exit status.
int run_experiment(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

// Entry point shared by the executable and the tests; args excludes argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace opplab::cli
