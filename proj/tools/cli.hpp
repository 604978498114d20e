#pragma once

// Command-line front end. Kept apart from main() so tests can drive it
// in-process.

#include <iosfwd>
#include <string>
#include <vector>

#include "hmgn/weights.hpp"

namespace hmgn::cli {

constexpr int kExitOk = 0;
constexpr int kExitSolveFailure = 1;
constexpr int kExitUsage = 2;

/// Parses "identity", "ar:phi1[,phi2,...][:sigma2]" or
/// "ma:theta1[,theta2,...][:sigma2]" into a weight for length n.
WeightSpec parse_weight_spec(const std::string& text, Index n);

/// Runs one command line; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hmgn::cli
