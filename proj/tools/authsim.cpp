#include <iostream>

#include <CLI11.hpp>

#include "authsim/commands.hpp"

namespace {

void add_common_flags(CLI::App& cmd, authsim::commands::CommonOptions& o) {
  cmd.add_option("--config", o.config_path, "key = value experiment config file");
  cmd.add_option("--lambda", o.lambda, "arrival rate, requests per second");
  cmd.add_option("--link-ms", o.link_ms, "mean link latency (stage 1 service), ms");
  cmd.add_option("--service-ms", o.service_ms, "mean auth service time (stage 2 service), ms");
  cmd.add_option("--duration-s", o.duration_s, "simulated seconds per replication (default 600)");
  cmd.add_option("--warmup-s", o.warmup_s, "discarded initial seconds (default 10% of duration)");
  cmd.add_option("--reps", o.reps, "replications per point (default 20)");
  cmd.add_option("--seed", o.seed, "base seed (default 1)");
  cmd.add_option("--out", o.out, "CSV output path");
  cmd.add_option("--dist", o.dist, "service distribution")->check(CLI::IsMember({"exp", "det"}));
  cmd.add_option("--threads", o.threads, "worker threads for replications (0 = all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace authsim::commands;

  CLI::App app{"Tandem-queue simulator for multiparty authentication latency"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  auto* run = app.add_subcommand("run", "simulate one scenario with replications");
  add_common_flags(*run, run_opts);

  SweepOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "simulate a lambda x link x service grid");
  add_common_flags(*sweep, sweep_opts.common);
  sweep->add_option("--lambdas", sweep_opts.lambdas, "arrival rates, e.g. 5:100:5 or 10,20,30");
  sweep->add_option("--link-ms-list", sweep_opts.link_ms_list, "link latencies in ms");
  sweep->add_option("--service-ms-list", sweep_opts.service_ms_list, "service times in ms");

  double o_lambda = 0.0;
  double o_link = 0.0;
  double o_service = 0.0;
  std::vector<double> o_quantiles;
  auto* oracle = app.add_subcommand("oracle", "closed-form cascade analytics");
  oracle->add_option("--lambda", o_lambda, "arrival rate, requests per second")->required();
  oracle->add_option("--link-ms", o_link, "mean link latency, ms")->required();
  oracle->add_option("--service-ms", o_service, "mean auth service time, ms")->required();
  oracle->add_option("-q,--quantile", o_quantiles, "sojourn quantile levels in (0, 1)");

  auto* check = app.add_subcommand("protocol-check", "exhaustive session-approval truth table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  if (*run) return cmd_run(run_opts, std::cout, std::cerr);
  if (*sweep) return cmd_sweep(sweep_opts, std::cout, std::cerr);
  if (*oracle) return cmd_oracle(o_lambda, o_link, o_service, o_quantiles, std::cout, std::cerr);
  if (*check) return cmd_protocol_check({}, std::cout, std::cerr);
  return kConfigError;
}
