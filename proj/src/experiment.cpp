#include "authsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "authsim/errors.hpp"
#include "authsim/oracle.hpp"

namespace authsim::experiment {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", what, text));
  }
  if (used != t.size() || !std::isfinite(v)) throw ConfigError(fmt::format("{}: '{}' is not a number", what, text));
  return v;
}

std::uint64_t parse_uint(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  if (t.empty() || !std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw ConfigError(fmt::format("{}: '{}' is not a non-negative integer", what, text));
  }
  try {
    return std::stoull(t);
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: '{}' is out of range", what, text));
  }
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (item.find(':') == std::string::npos) {
      out.push_back(parse_double(item, what));
      continue;
    }
    std::vector<double> parts;
    std::stringstream rs(item);
    std::string p;
    while (std::getline(rs, p, ':')) parts.push_back(parse_double(p, what));
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
      throw ConfigError(fmt::format("{}: range '{}' must be start:stop:step with step > 0", what, item));
    }
    // Integer stepping avoids accumulating rounding error.
    const auto steps = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (long k = 0; k <= steps; ++k) out.push_back(parts[0] + static_cast<double>(k) * parts[2]);
  }
  return out;
}

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& origin) {
  KeyValueConfig cfg;
  cfg.origin_ = origin;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("{}:{}: expected key = value", origin, lineno));
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", origin, lineno));
    cfg.values_[key] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file {}", path.string()));
  return parse(in, path.string());
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> KeyValueConfig::get_double(const std::string& key) const {
  if (auto v = get(key)) return parse_double(*v, key);
  return std::nullopt;
}

std::optional<std::uint64_t> KeyValueConfig::get_uint(const std::string& key) const {
  if (auto v = get(key)) return parse_uint(*v, key);
  return std::nullopt;
}

std::optional<bool> KeyValueConfig::get_bool(const std::string& key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, *v));
}

std::optional<std::vector<double>> KeyValueConfig::get_list(const std::string& key) const {
  if (auto v = get(key)) return parse_list(*v, key);
  return std::nullopt;
}

void KeyValueConfig::require_known(const std::vector<std::string>& allowed) const {
  for (const auto& [key, value] : values_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(fmt::format("{}: unknown key '{}'", origin_, key));
    }
  }
}

ScenarioConfig SweepSpec::point(std::size_t index) const {
  if (index >= size()) throw ParameterError(fmt::format("sweep point {} out of range", index));
  const std::size_t nl = lambda_values.size();
  const std::size_t ns = service_times_ms.size();
  ScenarioConfig cfg = ScenarioConfig::from_milliseconds(
      lambda_values[index % nl], link_latencies_ms[index / (nl * ns)], service_times_ms[(index / nl) % ns]);
  cfg.duration = duration;
  cfg.warmup = warmup;
  cfg.replications = replications;
  cfg.seed = derive_seed(base_seed, index);
  cfg.service_distribution = distribution;
  cfg.transmission_overhead = transmission_overhead;
  return cfg;
}

bool PointEvaluation::conserved() const {
  return std::all_of(counters.begin(), counters.end(),
                     [](const NetworkCounters& c) { return c.generated == c.completed + c.in_system; });
}

PointEvaluation evaluate_point(const ScenarioConfig& cfg, unsigned threads) {
  cfg.validate();
  std::vector<ReplicationResult> reps = run_replications(cfg, threads);

  PointEvaluation eval;
  std::size_t total = 0;
  for (const auto& r : reps) total += r.samples.values.size();
  eval.pooled.reserve(total);
  for (const auto& r : reps) {
    eval.counters.push_back(r.counters);
    if (r.samples.empty()) continue;
    eval.rep_means.push_back(r.samples.mean());
    eval.pooled.insert(eval.pooled.end(), r.samples.values.begin(), r.samples.values.end());
  }
  if (eval.pooled.empty()) {
    throw EmptySampleError(fmt::format("no completed post-warm-up requests at lambda={}", cfg.arrival_rate));
  }

  ResultRow& row = eval.row;
  row.lambda = cfg.arrival_rate;
  row.link_ms = cfg.link_latency * 1000.0;
  row.service_ms = cfg.auth_service_time * 1000.0;
  row.stats = metrics::summarize(eval.pooled);
  if (eval.rep_means.size() >= 2) {
    row.ci = metrics::replication_ci(eval.rep_means);
    row.mean = row.ci->point_estimate;
  } else {
    row.mean = eval.rep_means.front();
  }

  if (cfg.service_distribution == ServiceDistribution::exponential && cfg.transmission_overhead == 0.0 &&
      cfg.link_utilization() < 1.0 && cfg.server_utilization() < 1.0) {
    const double expected = oracle::cascade_mean_sojourn(
        oracle::CascadeParams::from_times(cfg.arrival_rate, cfg.link_latency, cfg.auth_service_time));
    row.oracle_mean = expected;
    row.rel_err = std::abs(row.mean - expected) / expected;
    row.ci_contains_oracle = row.ci && row.ci->contains(expected);
  }
  return eval;
}

double SweepResult::coverage() const {
  std::size_t with_oracle = 0;
  std::size_t covered = 0;
  for (const auto& r : rows) {
    if (!r.oracle_mean) continue;
    ++with_oracle;
    if (r.ci_contains_oracle) ++covered;
  }
  return with_oracle == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(with_oracle);
}

SweepResult run_sweep(const SweepSpec& spec, unsigned threads, std::ostream* log) {
  if (spec.size() == 0) throw ParameterError("sweep grid is empty");
  SweepResult result;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const ScenarioConfig cfg = spec.point(i);
    try {
      cfg.validate();
    } catch (const StabilityError& e) {
      std::string msg = fmt::format("skipping lambda={} link_ms={} service_ms={}: {}", cfg.arrival_rate,
                                    cfg.link_latency * 1000.0, cfg.auth_service_time * 1000.0, e.what());
      if (log) *log << "warning: " << msg << '\n';
      result.skipped.push_back(std::move(msg));
      continue;
    }
    result.rows.push_back(evaluate_point(cfg, threads).row);
  }
  return result;
}

const char* const kCsvHeader =
    "lambda,link_ms,service_ms,count,mean,stddev,min,q1,median,q3,whisker_low,whisker_high,outliers,max,"
    "oracle_mean,rel_err,ci_contains_oracle";

std::string format_number(double v) { return fmt::format("{:.10g}", v); }

std::string csv_row(const ResultRow& row) {
  const auto& s = row.stats;
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", format_number(row.lambda),
                     format_number(row.link_ms), format_number(row.service_ms), s.count, format_number(row.mean),
                     format_number(s.stddev), format_number(s.min), format_number(s.q1), format_number(s.median),
                     format_number(s.q3), format_number(s.whisker_low), format_number(s.whisker_high),
                     s.outlier_count, format_number(s.max),
                     row.oracle_mean ? format_number(*row.oracle_mean) : std::string(),
                     row.rel_err ? format_number(*row.rel_err) : std::string(),
                     row.ci_contains_oracle ? "true" : "false");
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool header) {
  if (header) out << kCsvHeader << '\n';
  for (const auto& r : rows) out << csv_row(r) << '\n';
}

std::vector<std::filesystem::path> write_plot_files(const std::filesystem::path& csv_path,
                                                    const std::vector<ResultRow>& rows) {
  // Series keyed by (L, S) in first-appearance order.
  std::vector<std::pair<std::pair<double, double>, std::vector<const ResultRow*>>> series;
  for (const auto& r : rows) {
    auto key = std::make_pair(r.link_ms, r.service_ms);
    auto it = std::find_if(series.begin(), series.end(), [&](const auto& s) { return s.first == key; });
    if (it == series.end()) {
      series.push_back({key, {}});
      it = series.end() - 1;
    }
    it->second.push_back(&r);
  }

  const auto dir = csv_path.parent_path();
  const std::string stem = csv_path.stem().string();
  std::vector<std::filesystem::path> written;
  for (const auto& [key, points] : series) {
    const std::string suffix = fmt::format("L{}_S{}", format_number(key.first), format_number(key.second));
    const auto curve_path = dir / fmt::format("{}_curve_{}.csv", stem, suffix);
    const auto box_path = dir / fmt::format("{}_box_{}.csv", stem, suffix);
    std::ofstream curve(curve_path);
    std::ofstream box(box_path);
    if (!curve || !box) throw Error(fmt::format("cannot write plot files next to {}", csv_path.string()));
    curve << "lambda,mean,ci_low,ci_high,oracle_mean\n";
    box << "lambda,whisker_low,q1,median,q3,whisker_high,outliers,min,max\n";
    for (const ResultRow* r : points) {
      curve << fmt::format("{},{},{},{},{}\n", format_number(r->lambda), format_number(r->mean),
                           r->ci ? format_number(r->ci->lower()) : std::string(),
                           r->ci ? format_number(r->ci->upper()) : std::string(),
                           r->oracle_mean ? format_number(*r->oracle_mean) : std::string());
      const auto& s = r->stats;
      box << fmt::format("{},{},{},{},{},{},{},{},{}\n", format_number(r->lambda), format_number(s.whisker_low),
                         format_number(s.q1), format_number(s.median), format_number(s.q3),
                         format_number(s.whisker_high), s.outlier_count, format_number(s.min),
                         format_number(s.max));
    }
    written.push_back(curve_path);
    written.push_back(box_path);
  }
  return written;
}

}  // namespace authsim::experiment
