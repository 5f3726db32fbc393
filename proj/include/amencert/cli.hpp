#pragma once

// Command dispatch for the amencert tool. Reports are JSON with sorted keys
// and shortest round-trip number formatting, so identical inputs give
// byte-identical files.

#include <iosfwd>
#include <string>
#include <vector>

#include "amencert/config.hpp"

namespace amencert::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode { kOk = 0, kInputError = 2, kNumericError = 3, kPolicyError = 4 };

struct CommandOutput {
  Json report;
  std::string csv;  // empty when the command has no series
};

/// certify | lambda1 | hellinger | evidence | near-isometry | replay | witness
CommandOutput execute(const std::string& command, const RunConfig& cfg);

std::string dump_report(const Json& report);
/// Shortest decimal that round-trips.
std::string format_number(double v);

/// args excludes the program name. Exceptions are mapped to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace amencert::cli
