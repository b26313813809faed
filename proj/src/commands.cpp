#include "authsim/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "authsim/errors.hpp"
#include "authsim/oracle.hpp"

namespace authsim::commands {
namespace {

using experiment::KeyValueConfig;

void make_parent_dirs(const std::filesystem::path& file) {
  std::error_code ec;
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path(), ec);
  if (ec) throw ConfigError(fmt::format("cannot create {}: {}", file.parent_path().string(), ec.message()));
}

const std::vector<std::string> kScenarioKeys = {
    "arrival_rate_per_s", "link_latency_ms", "service_time_ms", "duration_s",
    "warmup_s",           "replications",    "seed",            "distribution",
    "transmission_overhead_ms", "allow_unstable"};

const std::vector<std::string> kSweepKeys = [] {
  auto keys = kScenarioKeys;
  keys.insert(keys.end(), {"lambda_values", "link_latencies_ms", "service_times_ms"});
  return keys;
}();

KeyValueConfig load_config(const CommonOptions& opts, const std::vector<std::string>& allowed) {
  if (!opts.config_path) return {};
  KeyValueConfig file = KeyValueConfig::load(*opts.config_path);
  file.require_known(allowed);
  return file;
}

// Applies run controls shared by run and sweep.
struct Controls {
  Seconds duration = 600.0;
  std::optional<Seconds> warmup;
  unsigned replications = 20;
  std::uint64_t seed = 1;
  ServiceDistribution dist = ServiceDistribution::exponential;
  Seconds overhead = 0.0;
  bool allow_unstable = false;
};

Controls resolve_controls(const CommonOptions& opts, const KeyValueConfig& file) {
  Controls c;
  if (auto v = opts.duration_s ? opts.duration_s : file.get_double("duration_s")) c.duration = *v;
  if (auto v = opts.warmup_s ? opts.warmup_s : file.get_double("warmup_s")) c.warmup = *v;
  if (opts.reps) {
    c.replications = *opts.reps;
  } else if (auto v = file.get_uint("replications")) {
    c.replications = static_cast<unsigned>(*v);
  }
  if (auto v = opts.seed ? opts.seed : file.get_uint("seed")) c.seed = *v;
  if (auto v = opts.dist ? opts.dist : file.get("distribution")) c.dist = parse_service_distribution(*v);
  if (auto v = file.get_double("transmission_overhead_ms")) c.overhead = *v / 1000.0;
  if (auto v = file.get_bool("allow_unstable")) c.allow_unstable = *v;
  return c;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const StabilityError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kStabilityError;
  } catch (const ConfigError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kConfigError;
  } catch (const ParameterError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kConfigError;
  } catch (const EmptySampleError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kConfigError;
  }
}

void write_metadata(const std::filesystem::path& path, const Controls& c, std::size_t points) {
  std::ofstream meta(path);
  meta << "duration_s = " << experiment::format_number(c.duration) << '\n'
       << "warmup_s = " << experiment::format_number(c.warmup.value_or(0.1 * c.duration)) << '\n'
       << "replications = " << c.replications << '\n'
       << "seed = " << c.seed << '\n'
       << "distribution = " << to_string(c.dist) << '\n'
       << "grid_points = " << points << '\n';
}

}  // namespace

ScenarioConfig resolve_scenario(const CommonOptions& opts) {
  const KeyValueConfig file = load_config(opts, kScenarioKeys);
  const Controls c = resolve_controls(opts, file);

  auto lambda = opts.lambda ? opts.lambda : file.get_double("arrival_rate_per_s");
  auto link_ms = opts.link_ms ? opts.link_ms : file.get_double("link_latency_ms");
  auto service_ms = opts.service_ms ? opts.service_ms : file.get_double("service_time_ms");
  if (!lambda) throw ConfigError("arrival rate not given (--lambda or arrival_rate_per_s)");
  if (!link_ms) throw ConfigError("link latency not given (--link-ms or link_latency_ms)");
  if (!service_ms) throw ConfigError("service time not given (--service-ms or service_time_ms)");

  ScenarioConfig cfg = ScenarioConfig::from_milliseconds(*lambda, *link_ms, *service_ms);
  cfg.duration = c.duration;
  cfg.warmup = c.warmup;
  cfg.replications = c.replications;
  cfg.seed = derive_seed(c.seed, 0);
  cfg.service_distribution = c.dist;
  cfg.transmission_overhead = c.overhead;
  cfg.allow_unstable = c.allow_unstable;
  return cfg;
}

experiment::SweepSpec resolve_sweep(const SweepOptions& opts) {
  const KeyValueConfig file = load_config(opts.common, kSweepKeys);
  const Controls c = resolve_controls(opts.common, file);

  auto list = [&](const std::optional<std::string>& flag, const std::optional<double>& single,
                  const std::string& key) -> std::vector<double> {
    if (flag) return experiment::parse_list(*flag, key);
    if (single) return {*single};
    if (auto v = file.get_list(key)) return *v;
    return {};
  };

  experiment::SweepSpec spec;
  spec.lambda_values = list(opts.lambdas, opts.common.lambda, "lambda_values");
  spec.link_latencies_ms = list(opts.link_ms_list, opts.common.link_ms, "link_latencies_ms");
  spec.service_times_ms = list(opts.service_ms_list, opts.common.service_ms, "service_times_ms");
  spec.duration = c.duration;
  spec.warmup = c.warmup;
  spec.replications = c.replications;
  spec.base_seed = c.seed;
  spec.distribution = c.dist;
  spec.transmission_overhead = c.overhead;
  return spec;
}

int cmd_run(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ScenarioConfig cfg = resolve_scenario(opts);
    const auto eval = experiment::evaluate_point(cfg, opts.threads);
    const auto& row = eval.row;

    out << experiment::kCsvHeader << '\n' << experiment::csv_row(row) << '\n';

    fmt::print(err, "lambda={} L={} ms S={} ms: mean {:.6f} s", row.lambda, row.link_ms, row.service_ms, row.mean);
    if (row.ci) fmt::print(err, " (95% CI [{:.6f}, {:.6f}])", row.ci->lower(), row.ci->upper());
    if (row.oracle_mean) {
      fmt::print(err, ", oracle {:.6f} s, rel err {:.4f}, ci contains oracle: {}", *row.oracle_mean, *row.rel_err,
                 row.ci_contains_oracle);
    }
    fmt::print(err, "\n");

    if (opts.out) {
      make_parent_dirs(*opts.out);
      const bool fresh = !std::filesystem::exists(*opts.out) || std::filesystem::file_size(*opts.out) == 0;
      std::ofstream csv(*opts.out, std::ios::app);
      if (!csv) throw ConfigError(fmt::format("cannot open {} for writing", *opts.out));
      if (fresh) csv << experiment::kCsvHeader << '\n';
      csv << experiment::csv_row(row) << '\n';
    }
    return int{kOk};
  });
}

int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const experiment::SweepSpec spec = resolve_sweep(opts);
    const auto result = experiment::run_sweep(spec, opts.common.threads, &err);

    if (opts.common.out) {
      const std::filesystem::path path(*opts.common.out);
      make_parent_dirs(path);
      std::ofstream csv(path);
      if (!csv) throw ConfigError(fmt::format("cannot open {} for writing", path.string()));
      experiment::write_csv(csv, result.rows);
      experiment::write_plot_files(path, result.rows);
      const KeyValueConfig file = load_config(opts.common, kSweepKeys);
      write_metadata(path.parent_path() / (path.stem().string() + "_meta.txt"), resolve_controls(opts.common, file),
                     spec.size());
    } else {
      experiment::write_csv(out, result.rows);
    }

    std::size_t with_oracle = 0;
    for (const auto& r : result.rows) with_oracle += r.oracle_mean.has_value();
    fmt::print(err, "{} points run, {} skipped; CI covers oracle at {:.1f}% of {} oracle rows\n", result.rows.size(),
               result.skipped.size(), 100.0 * result.coverage(), with_oracle);
    return int{kOk};
  });
}

int cmd_oracle(double lambda, double link_ms, double service_ms, const std::vector<double>& quantiles,
               std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!(link_ms > 0.0) || !(service_ms > 0.0)) throw ParameterError("link and service times must be positive");
    if (lambda < 0.0) throw ParameterError("arrival rate must be non-negative");
    const auto p = oracle::CascadeParams::from_times(lambda, link_ms / 1000.0, service_ms / 1000.0);
    const double mean = oracle::cascade_mean_sojourn(p);
    fmt::print(out, "rho1 = {:.6g}\n", oracle::utilization(p.lambda, p.mu1));
    fmt::print(out, "rho2 = {:.6g}\n", oracle::utilization(p.lambda, p.mu2));
    fmt::print(out, "mean_sojourn_s = {:.6f}\n", mean);
    for (double q : quantiles) {
      fmt::print(out, "q{:g} = {:.6f}\n", q, oracle::cascade_quantile(q, p));
    }
    return int{kOk};
  });
}

int cmd_protocol_check(const protocol::ProtocolFixture& fixture, std::ostream& out, std::ostream& err) {
  using protocol::to_string;
  const auto results = protocol::run_exhaustive_check(fixture);
  fmt::print(out, "{:<4} {:<10} {:<8} {:<10} {:<8} {:<9} {:<5} {:<16} {:<16} {}\n", "case", "realm", "trusted",
             "principal", "trusted", "cert", "acks", "expected", "observed", "result");
  std::size_t granted = 0;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    granted += r.observed == protocol::Outcome::granted;
    failed += !r.passed();
    fmt::print(out, "{:<4} {:<10} {:<8} {:<10} {:<8} {:<9} {:<5} {:<16} {:<16} {}\n", i + 1, r.realm,
               r.realm_trusted ? "yes" : "no", r.principal, r.principal_trusted ? "yes" : "no",
               r.empty_targets ? "-" : (r.certificate_intact ? "intact" : "tampered"),
               r.empty_targets ? "-" : (r.clouds_ack ? "yes" : "no"), to_string(r.expected), to_string(r.observed),
               r.passed() ? "PASS" : (r.registry_leak ? "FAIL (registry leak)" : "FAIL"));
  }
  fmt::print(out, "{} cases: {} granted, {} not granted, {} failing\n", results.size(), granted,
             results.size() - granted, failed);
  if (failed > 0) {
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (!results[i].passed()) fmt::print(err, "case {} failed\n", i + 1);
    }
    return kAcceptanceFailure;
  }
  return kOk;
}

}  // namespace authsim::commands
