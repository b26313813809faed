#include <doctest.h>

#include <cmath>
#include <numeric>

#include "authsim/errors.hpp"
#include "authsim/oracle.hpp"
#include "authsim/queue_network.hpp"

using namespace authsim;

namespace {

ScenarioConfig scenario(double lambda, double link_ms, double service_ms, double duration = 600.0,
                        std::uint64_t seed = 1) {
  ScenarioConfig cfg = ScenarioConfig::from_milliseconds(lambda, link_ms, service_ms);
  cfg.duration = duration;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("build_network accepts a stable 4G scenario") {
  const ScenarioConfig cfg = scenario(30, 20, 6);
  CHECK(cfg.link_utilization() == doctest::Approx(0.6));
  CHECK(cfg.server_utilization() == doctest::Approx(0.18));
  auto net = build_network(cfg);
  CHECK(net->requests().empty());
  CHECK(net->now() == 0.0);
}

TEST_CASE("build_network rejects an unstable link") {
  try {
    build_network(scenario(60, 20, 6));
    FAIL("expected StabilityError");
  } catch (const StabilityError& e) {
    CHECK(e.station() == "station 1 (link)");
    CHECK(e.utilization() == doctest::Approx(1.2));
  }
  CHECK_THROWS_AS(build_network(scenario(170, 2, 6)), StabilityError);

  ScenarioConfig forced = scenario(60, 20, 6, 5.0);
  forced.allow_unstable = true;
  CHECK_NOTHROW(simulate(forced));
}

TEST_CASE("degenerate configs are parameter errors") {
  CHECK_THROWS_AS(build_network(scenario(0, 20, 6)), ParameterError);
  CHECK_THROWS_AS(build_network(scenario(10, 0, 6)), ParameterError);
  CHECK_THROWS_AS(build_network(scenario(10, 20, -1)), ParameterError);
  ScenarioConfig cfg = scenario(10, 20, 6);
  cfg.warmup = 600.0;
  CHECK_THROWS_AS(build_network(cfg), ParameterError);
  cfg.warmup.reset();
  cfg.replications = 0;
  CHECK_THROWS_AS(build_network(cfg), ParameterError);
}

TEST_CASE("single request through an empty deterministic system") {
  ScenarioConfig cfg = scenario(1, 20, 6, 10.0);
  cfg.service_distribution = ServiceDistribution::deterministic;
  cfg.warmup = 0.0;
  TandemNetwork net(cfg);
  net.inject(1.0);
  net.run_until(10.0);
  REQUIRE(net.requests().size() == 1);
  const Request& r = net.requests().front();
  CHECK(r.completed);
  CHECK(r.stage1_exit == 1.0 + 0.020);
  CHECK(r.total_delay() == doctest::Approx(0.026).epsilon(1e-12));

  cfg.transmission_overhead = 0.0002;
  TandemNetwork with_tx(cfg);
  with_tx.inject(0.0);
  with_tx.run_until(1.0);
  CHECK(with_tx.requests().front().total_delay() == doctest::Approx(0.0262).epsilon(1e-12));
}

TEST_CASE("deterministic service queues back-to-back injections") {
  ScenarioConfig cfg = scenario(1, 20, 6, 10.0);
  cfg.service_distribution = ServiceDistribution::deterministic;
  TandemNetwork net(cfg);
  net.inject(0.0);
  net.inject(0.0);
  net.run_until(1.0);
  const auto& rs = net.requests();
  REQUIRE(rs.size() == 2);
  CHECK(rs[0].total_delay() == doctest::Approx(0.026));
  // Second waits one link service, then finds the server free again.
  CHECK(rs[1].stage1_exit == doctest::Approx(0.040));
  CHECK(rs[1].total_delay() == doctest::Approx(0.046));
}

TEST_CASE("2 ms link at 100 req/s matches the analytic mean") {
  ScenarioConfig cfg = scenario(100, 2, 6);
  cfg.replications = 20;
  const auto reps = run_replications(cfg, 1);
  std::vector<double> means;
  for (const auto& r : reps) means.push_back(r.samples.mean());
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / means.size();
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  const double half = 2.093024054408263 * std::sqrt(ss / 19.0) / std::sqrt(20.0);
  CHECK(std::abs(grand - 0.0175) <= half);
}

TEST_CASE("4G scenario mean is near the analytic value") {
  const DelaySamples s = run_scenario(scenario(30, 20, 6, 600.0, 4));
  CHECK(s.values.size() > 15000);
  CHECK(s.mean() == doctest::Approx(0.0573170731707317).epsilon(0.10));
}

TEST_CASE("requests respect stage ordering, FIFO and conservation") {
  RngStream pick(77);
  for (int trial = 0; trial < 12; ++trial) {
    const double link_ms = 1.0 + 25.0 * pick.uniform_open();
    const double service_ms = 1.0 + 25.0 * pick.uniform_open();
    const double cap = 1000.0 / std::max(link_ms, service_ms);
    ScenarioConfig cfg = scenario(cap * (0.05 + 0.9 * pick.uniform_open()), link_ms, service_ms,
                                  20.0 + 100.0 * pick.uniform_open(), 1000 + trial);
    CAPTURE(cfg.arrival_rate);
    CAPTURE(link_ms);
    CAPTURE(service_ms);
    TandemNetwork net(cfg);
    net.run();

    const auto c = net.counters();
    REQUIRE(c.generated == c.completed + c.in_system);
    REQUIRE(c.generated == net.requests().size());

    const auto& rs = net.requests();
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const Request& r = rs[i];
      REQUIRE(r.id == i);
      REQUIRE(r.created_at <= cfg.duration);
      REQUIRE(r.created_at <= r.stage1_enter);
      if (!r.completed) continue;
      REQUIRE(r.stage1_enter <= r.stage1_exit);
      REQUIRE(r.stage1_exit <= r.stage2_enter);
      REQUIRE(r.stage2_enter <= r.stage2_exit);
      REQUIRE(r.total_delay() > 0.0);
      if (i > 0) {
        REQUIRE(rs[i - 1].stage1_exit <= r.stage1_exit);
        REQUIRE(rs[i - 1].completed);
        REQUIRE(rs[i - 1].stage2_exit <= r.stage2_exit);
      }
    }
  }
}

TEST_CASE("delay samples skip the warm-up") {
  ScenarioConfig cfg = scenario(30, 20, 6, 100.0, 8);
  TandemNetwork net(cfg);
  net.run();
  const DelaySamples s = net.delay_samples();
  std::size_t expected = 0;
  for (const Request& r : net.requests()) expected += r.completed && r.created_at >= 10.0;
  CHECK(s.values.size() == expected);
  CHECK(expected < net.counters().completed);
  CHECK_FALSE(s.warning);
}

TEST_CASE("empty post-warm-up sample produces a warning") {
  ScenarioConfig cfg = scenario(0.001, 20, 6, 1.0, 3);
  const DelaySamples s = run_scenario(cfg);
  CHECK(s.empty());
  REQUIRE(s.warning);
  CHECK_THROWS_AS(s.mean(), EmptySampleError);
}

TEST_CASE("source interarrivals are exponential with mean 1/lambda") {
  ScenarioConfig cfg = scenario(100, 2, 6, 1500.0, 21);
  TandemNetwork net(cfg);
  net.run();
  const auto& rs = net.requests();
  REQUIRE(rs.size() > 100'000);
  double sum = 0.0;
  double sum_sq = 0.0;
  const std::size_t n = rs.size() - 1;
  for (std::size_t i = 1; i < rs.size(); ++i) {
    const double gap = rs[i].created_at - rs[i - 1].created_at;
    sum += gap;
    sum_sq += gap * gap;
  }
  const double mean = sum / n;
  const double sd = std::sqrt((sum_sq - n * mean * mean) / (n - 1));
  CHECK(mean == doctest::Approx(0.01).epsilon(0.01));
  CHECK(sd / mean == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("link departures form a process with rate lambda") {
  ScenarioConfig cfg = scenario(40, 20, 6, 3000.0, 33);  // rho1 = 0.8
  TandemNetwork net(cfg);
  net.run();
  std::vector<double> exits;
  for (const Request& r : net.requests()) {
    if (r.stage1_exit > 0.0) exits.push_back(r.stage1_exit);
  }
  REQUIRE(exits.size() > 100'000);
  const double mean_gap = (exits.back() - exits.front()) / static_cast<double>(exits.size() - 1);
  CHECK(mean_gap == doctest::Approx(1.0 / 40.0).epsilon(0.01));
}

TEST_CASE("identical configs give identical samples") {
  const ScenarioConfig cfg = scenario(80, 5, 6, 120.0, 99);
  CHECK(run_scenario(cfg).values == run_scenario(cfg).values);
  ScenarioConfig other = cfg;
  other.seed = 100;
  CHECK(run_scenario(other).values != run_scenario(cfg).values);
}

TEST_CASE("replication results do not depend on thread count") {
  ScenarioConfig cfg = scenario(50, 5, 6, 60.0, 5);
  cfg.replications = 6;
  const auto serial = run_replications(cfg, 1);
  const auto parallel = run_replications(cfg, 3);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t r = 0; r < serial.size(); ++r) {
    CHECK(serial[r].seed == derive_seed(cfg.seed, r));
    CHECK(serial[r].samples.values == parallel[r].samples.values);
  }
}

TEST_CASE("transmission time") {
  CHECK(transmission_time(1000, 5e6) == doctest::Approx(0.0002));
  CHECK(transmission_time(1000, 50e6) == doctest::Approx(0.00002));
  CHECK_THROWS_AS(transmission_time(0, 5e6), ParameterError);
  CHECK_THROWS_AS(transmission_time(1000, 0.0), ParameterError);
}
