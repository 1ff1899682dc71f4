#pragma once

// Subcommands of the `parabolic` command-line tool. Each returns the process
// exit code: 0 success, 1 validation or convergence failure, 2 usage or
// configuration error.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "parabolic/config.hpp"

namespace parabolic::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kUsage = 2 };

struct Context {
  config::RunConfig config;
  std::filesystem::path out_dir = ".";
  int threads = 1;
  std::ostream* log = nullptr;  // progress and audit messages
};

int field_map(const Context& ctx);
int rate_scan(const Context& ctx);
int mode_table(const Context& ctx);
int perp_decomposition(const Context& ctx);
int isosurface(const Context& ctx);
int validate(const Context& ctx);

/// Full command-line entry point (argument parsing, config loading, dispatch).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace parabolic::cli
