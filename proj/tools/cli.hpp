#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fraccalc::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
    kSuccess = 0,
    kUsage = 2,        ///< bad flags, unreadable input or a domain error
    kRestriction = 3,  ///< model/method combination not offered
    kNumerical = 4,    ///< valid request whose computation failed
};

/// Runs one command line (without the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fraccalc::cli
