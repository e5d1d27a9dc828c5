#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mlexist::cli {

/// Exit codes.
constexpr int kOk = 0;
constexpr int kValidationError = 2;
constexpr int kNumericalError = 3;

/// Runs one command line (without the program name). Results go to `out`
/// or to the file named by --out; diagnostics and --verbose trace go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mlexist::cli
