#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>

#include "ppgcoop/engine.hpp"

namespace ppgcoop {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,  // bad flags, config or trace contents
  kExitRuntime = 2,     // I/O failure or invariant violation during a run
};

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Per-policy delivered series and the shared demand series of the first run.
/// With `hourly`, each row is the mean over one hour of slots.
void emit_plot_data(const std::filesystem::path& dir, std::span<const RunResult> runs,
                    bool hourly);

/// Mean buffer level against lambda, one row per run.
void emit_lambda_plot(const std::filesystem::path& dir, std::span<const RunResult> runs);

}  // namespace ppgcoop
