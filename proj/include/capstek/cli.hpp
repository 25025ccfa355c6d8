#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace capstek::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command. `args` excludes the program name. Artifacts go to the
/// --out path or to `out`; the one-line summary and usage text go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace capstek::cli
