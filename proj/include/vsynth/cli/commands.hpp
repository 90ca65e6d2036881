#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace vsynth::cli {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. `args` excludes the program name. Failures print a
/// single JSON line {"error","message"} to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::map<std::string, std::string>& environ_map);

/// Entry point for the vsynth binary; reads the process environment.
int run(int argc, char** argv);

/// Name of the error class, as printed in error records.
std::string error_kind(const std::exception& e);

}  // namespace vsynth::cli
