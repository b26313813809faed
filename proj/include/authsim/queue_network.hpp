#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "authsim/sim_kernel.hpp"

namespace authsim {

enum class ServiceDistribution { exponential, deterministic };

std::string to_string(ServiceDistribution d);
ServiceDistribution parse_service_distribution(const std::string& text);

// One tandem scenario: Poisson source -> link station -> auth-server station.
struct ScenarioConfig {
  double arrival_rate = 0.0;            // requests per second
  Seconds link_latency = 0.020;         // mean service time of station 1
  Seconds auth_service_time = 0.006;    // mean service time of station 2
  Seconds duration = 600.0;
  std::optional<Seconds> warmup;        // default: 10% of duration
  std::uint64_t seed = 1;
  unsigned replications = 20;
  ServiceDistribution service_distribution = ServiceDistribution::exponential;
  Seconds transmission_overhead = 0.0;  // constant added to every stage-1 service
  bool allow_unstable = false;

  Seconds effective_warmup() const { return warmup.value_or(0.1 * duration); }
  double link_utilization() const;
  double server_utilization() const;

  // Throws ParameterError for degenerate values, StabilityError when a station
  // has utilization >= 1 and allow_unstable is false.
  void validate() const;

  static ScenarioConfig from_milliseconds(double arrival_rate, double link_ms, double service_ms);
};

struct Request {
  std::uint64_t id = 0;
  Seconds created_at = 0.0;
  Seconds stage1_enter = 0.0;
  Seconds stage1_exit = 0.0;
  Seconds stage2_enter = 0.0;
  Seconds stage2_exit = 0.0;
  bool completed = false;

  Seconds total_delay() const noexcept { return stage2_exit - created_at; }
};

// Completed post-warmup total delays, in completion order.
struct DelaySamples {
  std::vector<double> values;
  ScenarioConfig scenario;
  std::optional<std::string> warning;

  bool empty() const noexcept { return values.empty(); }
  double mean() const;
};

struct NetworkCounters {
  std::uint64_t generated = 0;
  std::uint64_t completed = 0;
  std::uint64_t in_system = 0;
};

// Single-server FIFO station with an unbounded waiting line. Service times
// are drawn when service starts.
class Station {
 public:
  using ServiceSampler = std::function<Seconds()>;
  using Departure = std::function<void(std::uint64_t request_index)>;

  Station(std::string name, EventSchedule& schedule, ServiceSampler sampler, Departure on_departure);

  void arrive(std::uint64_t request_index);

  const std::string& name() const noexcept { return name_; }
  bool busy() const noexcept { return busy_; }
  std::size_t waiting() const noexcept { return waiting_.size(); }
  std::uint64_t departures() const noexcept { return departures_; }

 private:
  void start_service();
  void finish_service();

  std::string name_;
  EventSchedule& schedule_;
  ServiceSampler sampler_;
  Departure on_departure_;
  std::deque<std::uint64_t> waiting_;
  std::optional<std::uint64_t> in_service_;
  bool busy_ = false;
  std::uint64_t departures_ = 0;
};

// The wired tandem. Owns the schedule, the three random streams (arrivals,
// stage-1 service, stage-2 service) and every request record.
class TandemNetwork {
 public:
  explicit TandemNetwork(const ScenarioConfig& cfg);
  TandemNetwork(const TandemNetwork&) = delete;
  TandemNetwork& operator=(const TandemNetwork&) = delete;

  // Starts Poisson arrivals; the source stops generating after cfg.duration.
  void start_source();

  // Schedules creation of one request at time `at` (>= now).
  void inject(Seconds at);

  void run_until(Seconds horizon);

  // Starts the source and runs to cfg.duration.
  void run();

  Seconds now() const noexcept { return schedule_.now(); }
  const std::vector<Request>& requests() const noexcept { return requests_; }
  NetworkCounters counters() const;
  const Station& link() const noexcept { return link_; }
  const Station& server() const noexcept { return server_; }
  const ScenarioConfig& config() const noexcept { return cfg_; }

  // Total delays of completed requests created at or after the warm-up.
  DelaySamples delay_samples() const;

 private:
  Seconds draw_service(RngStream& rng, Seconds mean);
  void schedule_next_arrival();
  void create_request();

  ScenarioConfig cfg_;
  EventSchedule schedule_;
  RngStream arrival_rng_;
  RngStream link_rng_;
  RngStream server_rng_;
  std::vector<Request> requests_;
  std::uint64_t completed_ = 0;
  Station link_;
  Station server_;
};

// Validates cfg (see ScenarioConfig::validate) and wires the network.
std::unique_ptr<TandemNetwork> build_network(const ScenarioConfig& cfg);

struct ReplicationResult {
  DelaySamples samples;
  NetworkCounters counters;
  std::uint64_t seed = 0;
};

// One replication driven by cfg.seed.
ReplicationResult simulate(const ScenarioConfig& cfg);

DelaySamples run_scenario(const ScenarioConfig& cfg);

// cfg.replications independent runs; replication r uses
// derive_seed(cfg.seed, r). Results are in replication order whatever the
// thread count (0 = hardware concurrency).
std::vector<ReplicationResult> run_replications(const ScenarioConfig& cfg, unsigned threads = 0);

// Serialization time of a packet; not part of the queue model by default.
Seconds transmission_time(std::uint64_t packet_bits, double data_rate_bits_per_s);

}  // namespace authsim
