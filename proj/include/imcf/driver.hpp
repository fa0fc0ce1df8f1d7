#pragma once

// Subcommand implementations behind the CLI. Each returns the process exit
// code (0 success / all checks passed, 1 a check failed); configuration,
// numerical, and precondition errors are thrown and mapped to exit codes by
// the caller.

#include <string>

#include "imcf/config.hpp"

namespace imcf {

int cmd_run(const RunConfig& cfg, bool quiet);
int cmd_check(const RunConfig& cfg, bool quiet);
int cmd_oracle_compare(const RunConfig& cfg, bool quiet);
int cmd_lifespan(const RunConfig& cfg, double t_eval, bool quiet);

// Maps a thrown Error to the documented exit code; rethrows nothing.
int exit_code_for(const std::exception& e);

}  // namespace imcf
