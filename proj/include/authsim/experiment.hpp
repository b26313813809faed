#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "authsim/metrics.hpp"
#include "authsim/queue_network.hpp"

namespace authsim::experiment {

// Flat `key = value` text, one pair per line, `#` starts a comment. Units are
// part of the key name (link_latency_ms, duration_s, ...).
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& origin = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.contains(key); }
  std::optional<std::string> get(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<std::uint64_t> get_uint(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;
  std::optional<std::vector<double>> get_list(const std::string& key) const;

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  // Throws ConfigError naming the first key outside `allowed`.
  void require_known(const std::vector<std::string>& allowed) const;

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

double parse_double(const std::string& text, const std::string& what);
std::uint64_t parse_uint(const std::string& text, const std::string& what);

// "10,20,30" or an inclusive range "start:stop:step" (ranges and single
// values may be mixed: "1,5:20:5").
std::vector<double> parse_list(const std::string& text, const std::string& what);

struct SweepSpec {
  std::vector<double> lambda_values;
  std::vector<double> link_latencies_ms;
  std::vector<double> service_times_ms;
  Seconds duration = 600.0;
  std::optional<Seconds> warmup;
  unsigned replications = 20;
  std::uint64_t base_seed = 1;
  ServiceDistribution distribution = ServiceDistribution::exponential;
  Seconds transmission_overhead = 0.0;

  std::size_t size() const {
    return lambda_values.size() * link_latencies_ms.size() * service_times_ms.size();
  }
  // Grid point `index` in link-major, then service, then lambda order. Its
  // seed is derive_seed(base_seed, index).
  ScenarioConfig point(std::size_t index) const;
};

struct ResultRow {
  double lambda = 0.0;
  double link_ms = 0.0;
  double service_ms = 0.0;
  metrics::SummaryStats stats;     // over pooled post-warm-up delays
  double mean = 0.0;               // grand mean of the replication means
  std::optional<metrics::ReplicationCI> ci;
  std::optional<double> oracle_mean;
  std::optional<double> rel_err;
  bool ci_contains_oracle = false;
};

struct PointEvaluation {
  ResultRow row;
  std::vector<double> pooled;      // every replication's samples, in replication order
  std::vector<double> rep_means;
  std::vector<NetworkCounters> counters;

  bool conserved() const;
};

// Runs cfg.replications replications and compares them with the analytic
// cascade. Oracle fields are only set for exponential service with no
// transmission overhead.
PointEvaluation evaluate_point(const ScenarioConfig& cfg, unsigned threads = 0);

struct SweepResult {
  std::vector<ResultRow> rows;             // grid order
  std::vector<std::string> skipped;        // one message per unstable point
  double coverage() const;                 // fraction of oracle rows with ci_contains_oracle
};

// Throws ParameterError for an empty grid. Unstable points are skipped and
// reported in `skipped`.
SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 0, std::ostream* log = nullptr);

extern const char* const kCsvHeader;

std::string format_number(double v);
std::string csv_row(const ResultRow& row);
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool header = true);

// Per-(L, S) companion files next to `csv_path`:
//   <stem>_curve_L<L>_S<S>.csv  lambda,mean,ci_low,ci_high,oracle_mean
//   <stem>_box_L<L>_S<S>.csv    lambda,whisker_low,q1,median,q3,whisker_high,outliers,min,max
// Returns the paths written.
std::vector<std::filesystem::path> write_plot_files(const std::filesystem::path& csv_path,
                                                    const std::vector<ResultRow>& rows);

}  // namespace authsim::experiment
