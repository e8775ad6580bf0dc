#pragma once

// Command-line front end. Exit codes: 0 success, 1 computation or output
// failure, 2 usage or input error.

#include <iosfwd>
#include <string>
#include <vector>

namespace povmcert::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kOutDirEnv = "POVMCERT_OUT_DIR";

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same as above with `args` excluding the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace povmcert::cli
