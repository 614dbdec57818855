#pragma once

#include <string>
#include <vector>

namespace alertforge::cli {

// Exit codes: 0 success, 2 parse failure, 3 empty result, 4 numerics abort,
// 5 missing artifact.
inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitEmpty = 3;
inline constexpr int kExitNumerics = 4;
inline constexpr int kExitMissingArtifact = 5;

// Runs one subcommand (args exclude the program name). All artifacts are
// deterministic functions of the inputs, flags, and seed.
int run(const std::vector<std::string>& args);

}  // namespace alertforge::cli
