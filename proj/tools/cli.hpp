#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace psr::cli {

inline constexpr int kOk = 0;
inline constexpr int kDomain = 2;
inline constexpr int kConvergence = 3;
inline constexpr int kMismatch = 4;

// Runs one command line (args excludes the program name). Tables go to the
// --output file when given, else to out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Number formatting used in all tables.
std::string fmt_value(double v);
std::string fmt_exact(double v);

}  // namespace psr::cli
