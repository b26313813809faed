#include "authsim/queue_network.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "authsim/errors.hpp"

namespace authsim {
namespace {

enum StreamId : std::uint64_t { kArrivalStream = 0, kLinkStream = 1, kServerStream = 2 };

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

std::string to_string(ServiceDistribution d) {
  return d == ServiceDistribution::exponential ? "exp" : "det";
}

ServiceDistribution parse_service_distribution(const std::string& text) {
  if (text == "exp" || text == "exponential") return ServiceDistribution::exponential;
  if (text == "det" || text == "deterministic") return ServiceDistribution::deterministic;
  throw ConfigError(fmt::format("unknown service distribution '{}' (expected exp or det)", text));
}

double ScenarioConfig::link_utilization() const {
  return arrival_rate * (link_latency + transmission_overhead);
}

double ScenarioConfig::server_utilization() const { return arrival_rate * auth_service_time; }

void ScenarioConfig::validate() const {
  if (!positive_finite(arrival_rate)) {
    throw ParameterError(fmt::format("arrival rate must be positive, got {}", arrival_rate));
  }
  if (!positive_finite(link_latency)) {
    throw ParameterError(fmt::format("link latency must be positive, got {}", link_latency));
  }
  if (!positive_finite(auth_service_time)) {
    throw ParameterError(fmt::format("auth service time must be positive, got {}", auth_service_time));
  }
  if (!positive_finite(duration)) {
    throw ParameterError(fmt::format("duration must be positive, got {}", duration));
  }
  const Seconds w = effective_warmup();
  if (!(w >= 0.0 && w < duration)) {
    throw ParameterError(fmt::format("warm-up must lie in [0, duration), got {}", w));
  }
  if (replications < 1) throw ParameterError("replications must be >= 1");
  if (!(transmission_overhead >= 0.0) || !std::isfinite(transmission_overhead)) {
    throw ParameterError("transmission overhead must be >= 0");
  }
  if (!allow_unstable) {
    if (link_utilization() >= 1.0) throw StabilityError("station 1 (link)", link_utilization());
    if (server_utilization() >= 1.0) throw StabilityError("station 2 (auth server)", server_utilization());
  }
}

ScenarioConfig ScenarioConfig::from_milliseconds(double arrival_rate, double link_ms, double service_ms) {
  ScenarioConfig cfg;
  cfg.arrival_rate = arrival_rate;
  cfg.link_latency = link_ms / 1000.0;
  cfg.auth_service_time = service_ms / 1000.0;
  return cfg;
}

double DelaySamples::mean() const {
  if (values.empty()) throw EmptySampleError("mean of an empty delay sample");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

Station::Station(std::string name, EventSchedule& schedule, ServiceSampler sampler, Departure on_departure)
    : name_(std::move(name)),
      schedule_(schedule),
      sampler_(std::move(sampler)),
      on_departure_(std::move(on_departure)) {}

void Station::arrive(std::uint64_t request_index) {
  waiting_.push_back(request_index);
  if (!busy_) start_service();
}

void Station::start_service() {
  in_service_ = waiting_.front();
  waiting_.pop_front();
  busy_ = true;
  schedule_.schedule_after(sampler_(), [this] { finish_service(); });
}

void Station::finish_service() {
  const std::uint64_t done = *in_service_;
  in_service_.reset();
  busy_ = false;
  ++departures_;
  on_departure_(done);
  if (!waiting_.empty()) start_service();
}

TandemNetwork::TandemNetwork(const ScenarioConfig& cfg)
    : cfg_((cfg.validate(), cfg)),
      arrival_rng_(cfg.seed, kArrivalStream),
      link_rng_(cfg.seed, kLinkStream),
      server_rng_(cfg.seed, kServerStream),
      link_("link", schedule_,
            [this] { return draw_service(link_rng_, cfg_.link_latency) + cfg_.transmission_overhead; },
            [this](std::uint64_t i) {
              Request& r = requests_[i];
              r.stage1_exit = schedule_.now();
              r.stage2_enter = schedule_.now();
              server_.arrive(i);
            }),
      server_("auth-server", schedule_,
              [this] { return draw_service(server_rng_, cfg_.auth_service_time); },
              [this](std::uint64_t i) {
                Request& r = requests_[i];
                r.stage2_exit = schedule_.now();
                r.completed = true;
                ++completed_;
              }) {
  requests_.reserve(static_cast<std::size_t>(cfg_.arrival_rate * cfg_.duration * 1.05) + 16);
}

Seconds TandemNetwork::draw_service(RngStream& rng, Seconds mean) {
  return cfg_.service_distribution == ServiceDistribution::exponential ? rng.exponential(mean) : mean;
}

void TandemNetwork::start_source() { schedule_next_arrival(); }

void TandemNetwork::schedule_next_arrival() {
  const Seconds at = schedule_.now() + arrival_rng_.exponential(1.0 / cfg_.arrival_rate);
  if (at > cfg_.duration) return;
  schedule_.schedule(at, [this] {
    create_request();
    schedule_next_arrival();
  });
}

void TandemNetwork::create_request() {
  const Seconds now = schedule_.now();
  Request r;
  r.id = requests_.size();
  r.created_at = now;
  r.stage1_enter = now;
  requests_.push_back(r);
  link_.arrive(r.id);
}

void TandemNetwork::inject(Seconds at) {
  schedule_.schedule(at, [this] { create_request(); });
}

void TandemNetwork::run_until(Seconds horizon) { schedule_.run_until(horizon); }

void TandemNetwork::run() {
  start_source();
  run_until(cfg_.duration);
}

NetworkCounters TandemNetwork::counters() const {
  NetworkCounters c;
  c.generated = requests_.size();
  c.completed = completed_;
  c.in_system = link_.waiting() + (link_.busy() ? 1 : 0) + server_.waiting() + (server_.busy() ? 1 : 0);
  return c;
}

DelaySamples TandemNetwork::delay_samples() const {
  DelaySamples out;
  out.scenario = cfg_;
  const Seconds warmup = cfg_.effective_warmup();
  out.values.reserve(requests_.size());
  for (const Request& r : requests_) {
    if (r.completed && r.created_at >= warmup) out.values.push_back(r.total_delay());
  }
  if (out.values.empty()) {
    out.warning = fmt::format("no completed requests after warm-up {} s (lambda={}, duration={} s)", warmup,
                              cfg_.arrival_rate, cfg_.duration);
  }
  return out;
}

std::unique_ptr<TandemNetwork> build_network(const ScenarioConfig& cfg) {
  return std::make_unique<TandemNetwork>(cfg);
}

ReplicationResult simulate(const ScenarioConfig& cfg) {
  auto net = build_network(cfg);
  net->run();
  return ReplicationResult{net->delay_samples(), net->counters(), cfg.seed};
}

DelaySamples run_scenario(const ScenarioConfig& cfg) { return simulate(cfg).samples; }

std::vector<ReplicationResult> run_replications(const ScenarioConfig& cfg, unsigned threads) {
  cfg.validate();
  const unsigned reps = cfg.replications;
  std::vector<ReplicationResult> results(reps);
  auto run_one = [&](unsigned r) {
    ScenarioConfig rep_cfg = cfg;
    rep_cfg.seed = derive_seed(cfg.seed, r);
    rep_cfg.replications = 1;
    results[r] = simulate(rep_cfg);
    results[r].samples.scenario = cfg;
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, reps);
  if (threads <= 1) {
    for (unsigned r = 0; r < reps; ++r) run_one(r);
    return results;
  }

  std::atomic<unsigned> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (unsigned r = next++; r < reps && !failed; r = next++) {
          try {
            run_one(r);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

Seconds transmission_time(std::uint64_t packet_bits, double data_rate_bits_per_s) {
  if (packet_bits == 0) throw ParameterError("packet size must be positive");
  if (!positive_finite(data_rate_bits_per_s)) throw ParameterError("data rate must be positive");
  return static_cast<double>(packet_bits) / data_rate_bits_per_s;
}

}  // namespace authsim
