#pragma once

#include "relaylab/sim.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace relaylab {

/// Fraction of (trial, scheme) solves that may fail before the process
/// reports exit code 4.
inline constexpr double kMaxFailureRate = 0.10;

/// Exit codes: 0 success, 2 usage, 3 output I/O, 4 solver failure rate
/// above kMaxFailureRate.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitIo = 3,
    kExitSolverFailures = 4,
};

struct CliConfig {
    std::string command;  // single | cdf | sweep | oracle
    ExperimentSpec spec;
    std::optional<std::string> out_path;
    std::string format = "csv";  // csv | json
    std::optional<std::string> dump_channels_path;
};

/// Full front end: parse, run, emit. Writes results to `out` (or the --out
/// file), diagnostics to `err`. Returns an ExitCode value.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Fixed-point of the serialization contract: shortest representation with
/// 12 significant digits.
std::string format_rate(double v);

}  // namespace relaylab
