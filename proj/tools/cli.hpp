/**
 * @file cli.hpp
 * @brief `mriqc-dhogm` command-line front end
 */
#pragma once

#include <string>
#include <vector>

namespace dhogm::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand and returns the process exit code: 0 on success
/// (possibly with per-subject failures), 1 when nothing succeeded, 2 on a
/// usage error.
int run_cli(int argc, const char *const *argv);
int run_cli(const std::vector<std::string> &args);

} // namespace dhogm::cli
