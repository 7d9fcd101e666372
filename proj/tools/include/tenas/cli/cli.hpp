#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tenas::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 2;
inline constexpr int kExitInternalError = 3;

/// Runs one `tenas` invocation. `args` excludes the program name. The
/// primary result goes to `out`, logs and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tenas::cli
