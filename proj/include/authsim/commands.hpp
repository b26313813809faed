#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "authsim/auth_protocol.hpp"
#include "authsim/experiment.hpp"

// Subcommand bodies for the authsim CLI. Each returns the process exit code.
namespace authsim::commands {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kStabilityError = 3,
  kAcceptanceFailure = 4,
};

// Flag values; unset fields fall back to the config file, then to defaults.
struct CommonOptions {
  std::optional<std::string> config_path;
  std::optional<double> lambda;
  std::optional<double> link_ms;
  std::optional<double> service_ms;
  std::optional<double> duration_s;
  std::optional<double> warmup_s;
  std::optional<unsigned> reps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> dist;
  unsigned threads = 0;
};

struct SweepOptions {
  CommonOptions common;
  std::optional<std::string> lambdas;       // list syntax of parse_list
  std::optional<std::string> link_ms_list;
  std::optional<std::string> service_ms_list;
};

// Resolves flags over the config file. Point seed is derive_seed(seed, 0) so a
// single-point sweep reproduces `run` exactly.
ScenarioConfig resolve_scenario(const CommonOptions& opts);
experiment::SweepSpec resolve_sweep(const SweepOptions& opts);

int cmd_run(const CommonOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err);
int cmd_oracle(double lambda, double link_ms, double service_ms, const std::vector<double>& quantiles,
               std::ostream& out, std::ostream& err);
int cmd_protocol_check(const protocol::ProtocolFixture& fixture, std::ostream& out, std::ostream& err);

}  // namespace authsim::commands
