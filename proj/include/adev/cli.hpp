#pragma once

#include <string>

namespace adev {

// Exit codes of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitFailure = 2;

/// Entry point of the `adev` tool. argv[0] is the program name and argv[1]
/// the command; see `adev --help`.
int run_cli(int argc, const char* const* argv);

/// The report with its `meta` object removed, serialized. Two runs with the
/// same inputs and seed give equal strings.
std::string report_without_meta(const std::string& report_json);

}  // namespace adev
