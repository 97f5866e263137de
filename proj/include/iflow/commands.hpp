#pragma once

#include "iflow/identities.hpp"
#include "iflow/system_spec.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace iflow::cli {

enum class Command { compute, verify, fuzz, simulate, sweep };
enum class OutputFormat { json, csv };

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitInputError = 2;

struct SweepParameter {
  std::string path;  // e.g. "forward_channel.eps"
  double from = 0.0;
  double to = 0.5;
  int steps = 51;
};

struct RunConfig {
  Command command = Command::compute;
  std::string spec_path;
  double tolerance = kDefaultTolerance;
  std::uint64_t seed = 42;
  std::uint64_t samples = 100000;
  std::uint64_t trials = 200;
  int max_n = 4;
  int alphabet_max = 3;
  EncoderMode encoder = EncoderMode::deterministic;
  std::optional<SweepParameter> sweep;
  /// json by default; csv by default for sweep.
  std::optional<OutputFormat> format;
  unsigned jobs = 1;
  bool proof_trace = false;
  /// compute only: also write the exact joint as CSV here.
  std::optional<std::string> dump_joint;
  std::uint64_t guard = kDefaultGuard;
};

struct CommandResult {
  int exit_code = kExitOk;
  std::string report;      // machine-readable output (JSON or CSV)
  std::string summary;     // human-readable summary
  std::string diagnostic;  // error text when exit_code == kExitInputError
};

/// Runs one command. Input and usage errors come back as kExitInputError with
/// a diagnostic rather than as exceptions. Output depends only on the config.
CommandResult run(const RunConfig& config);

/// Per-step table of every identity, aligned term by term.
std::string proof_trace(const std::vector<IdentityReport>& reports);

}  // namespace iflow::cli
