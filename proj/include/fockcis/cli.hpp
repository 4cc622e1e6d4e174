// cli.hpp — command-line orchestration, callable in-process for tests.

#pragma once

#include <string>
#include <vector>

namespace fockcis {

inline constexpr const char* kLibraryVersion = "0.1.0";

// Runs the CLI on the given arguments (program name excluded). Returns the
// process exit code: 0 when the computation completed (all verdicts count as
// success), nonzero for input or numeric errors.
int run_cli(const std::vector<std::string>& args);

}  // namespace fockcis
