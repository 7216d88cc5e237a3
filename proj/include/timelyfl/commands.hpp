#pragma once

// Command-line front end. One subcommand per experiment:
//
//   age-exact   closed-form average age and its three terms
//   age-approx  large-n approximation from (alpha, beta)
//   simulate    Monte-Carlo run of one scheme, or all three (--scheme all)
//   compare     shorthand for simulate --scheme all
//   sweep       (m, k) grid search, or a figure family (--figure figN)
//   fl-train    federated linear-regression convergence runs
//
// Exit codes: 0 success, 2 usage or validation error, 3 I/O error.

#include <iosfwd>
#include <string>
#include <vector>

namespace timelyfl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "TIMELYFL_OUT_DIR";

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace timelyfl
