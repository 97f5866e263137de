// iflow: exact information-flow computation and identity verification for
// finite closed-loop feedback systems.

#include "iflow/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

namespace {

using iflow::cli::Command;
using iflow::cli::OutputFormat;
using iflow::cli::RunConfig;

struct Flags {
  RunConfig config;
  std::string out_path;
  std::string format;
  std::optional<std::string> param;
  double from = 0.0;
  double to = 0.5;
  int steps = 51;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--out", f.out_path, "Write the report here (default: standard output)");
  cmd->add_option("--format", f.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--tol", f.config.tolerance, "Identity tolerance in bits");
  cmd->add_option("--jobs", f.config.jobs, "Worker cap; never changes results");
}

void add_spec(CLI::App* cmd, Flags& f) {
  cmd->add_option("--spec", f.config.spec_path, "System spec file (JSON)")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact information flows in finite closed-loop feedback systems"};
  app.require_subcommand(1);
  Flags f;
  f.config.guard = iflow::guard_from_env();

  auto* compute = app.add_subcommand("compute", "Compute the named information quantities");
  add_spec(compute, f);
  add_common(compute, f);
  compute->add_option("--dump-joint", f.config.dump_joint, "Also write the exact joint distribution as CSV");

  auto* verify = app.add_subcommand("verify", "Verify every information identity");
  add_spec(verify, f);
  add_common(verify, f);
  verify->add_flag("--proof-trace", f.config.proof_trace, "Print per-step terms of each identity");

  static const std::map<std::string, iflow::EncoderMode> modes{{"det", iflow::EncoderMode::deterministic},
                                                                {"stoch", iflow::EncoderMode::stochastic}};
  auto* fuzz = app.add_subcommand("fuzz", "Verify the identities on seeded random systems");
  add_common(fuzz, f);
  fuzz->add_option("--seed", f.config.seed, "Master seed");
  fuzz->add_option("--trials", f.config.trials, "Number of random systems");
  fuzz->add_option("--max-n", f.config.max_n, "Largest horizon");
  fuzz->add_option("--alphabet-max", f.config.alphabet_max, "Largest alphabet size");
  fuzz->add_option("--encoder", f.config.encoder, "Encoder kind")->transform(CLI::CheckedTransformer(modes));

  auto* simulate = app.add_subcommand("simulate", "Compare plug-in estimates from samples with exact values");
  add_spec(simulate, f);
  add_common(simulate, f);
  simulate->add_option("--seed", f.config.seed, "Sampling seed");
  simulate->add_option("--samples", f.config.samples, "Number of trajectories");

  auto* sweep = app.add_subcommand("sweep", "Sweep a shorthand kernel parameter");
  add_spec(sweep, f);
  add_common(sweep, f);
  sweep->add_option("--param", f.param, "Kernel field, e.g. forward_channel.eps")->required();
  sweep->add_option("--from", f.from, "First value");
  sweep->add_option("--to", f.to, "Last value");
  sweep->add_option("--steps", f.steps, "Number of rows (>= 2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : iflow::cli::kExitInputError;
  }

  if (!f.format.empty()) f.config.format = f.format == "csv" ? OutputFormat::csv : OutputFormat::json;
  if (*compute) f.config.command = Command::compute;
  if (*verify) f.config.command = Command::verify;
  if (*fuzz) f.config.command = Command::fuzz;
  if (*simulate) f.config.command = Command::simulate;
  if (*sweep) {
    f.config.command = Command::sweep;
    f.config.sweep = iflow::cli::SweepParameter{*f.param, f.from, f.to, f.steps};
  }

  const auto result = iflow::cli::run(f.config);
  if (result.exit_code == iflow::cli::kExitInputError) {
    std::cerr << "error: " << result.diagnostic << '\n';
    return result.exit_code;
  }
  if (f.out_path.empty()) {
    std::cout << result.report;
    if (f.config.proof_trace) std::cerr << result.summary;
  } else {
    std::ofstream out(f.out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << f.out_path << '\n';
      return iflow::cli::kExitInputError;
    }
    out << result.report;
    std::cout << result.summary;
  }
  return result.exit_code;
}
