#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "authsim/errors.hpp"
#include "authsim/metrics.hpp"
#include "authsim/queue_network.hpp"
#include "authsim/sim_kernel.hpp"

using namespace authsim;
using namespace authsim::metrics;

TEST_CASE("five-point fixture") {
  const std::vector<double> xs{1, 2, 3, 4, 100};
  const SummaryStats s = summarize(xs);
  CHECK(s.count == 5);
  CHECK(s.q1 == 2.0);
  CHECK(s.median == 3.0);
  CHECK(s.q3 == 4.0);
  CHECK(s.iqr == 2.0);
  CHECK(s.fence_high == 7.0);
  CHECK(s.fence_low == -1.0);
  CHECK(s.whisker_high == 4.0);
  CHECK(s.whisker_low == 1.0);
  CHECK(s.outlier_count == 1);
  CHECK(s.min == 1.0);
  CHECK(s.max == 100.0);
  CHECK(s.mean == doctest::Approx(22.0));
}

TEST_CASE("constant data") {
  const std::vector<double> xs{5, 5, 5, 5};
  const SummaryStats s = summarize(xs);
  CHECK(s.mean == 5.0);
  CHECK(s.median == 5.0);
  CHECK(s.iqr == 0.0);
  CHECK(s.outlier_count == 0);
  CHECK(s.stddev == 0.0);
}

TEST_CASE("property: constant samples of any value and length") {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 50; ++i) {
    const double c = std::uniform_real_distribution<double>(-1e3, 1e3)(gen);
    const std::size_t n = 1 + gen() % 40;
    const std::vector<double> xs(n, c);
    const SummaryStats s = summarize(xs);
    REQUIRE(s.mean == c);
    REQUIRE(s.median == c);
    REQUIRE(s.q1 == c);
    REQUIRE(s.q3 == c);
    REQUIRE(s.iqr == 0.0);
    REQUIRE(s.outlier_count == 0);
  }
}

TEST_CASE("single sample") {
  const std::vector<double> xs{0.25};
  const SummaryStats s = summarize(xs);
  CHECK(s.count == 1);
  CHECK(s.stddev == 0.0);
  CHECK(s.whisker_low == 0.25);
  CHECK(s.whisker_high == 0.25);
}

TEST_CASE("empty sample is an error") {
  CHECK_THROWS_AS(summarize(std::vector<double>{}), EmptySampleError);
}

TEST_CASE("property: permutation invariance, ordering and brute-force outlier rule") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen() % 60;
    std::vector<double> xs(n);
    std::lognormal_distribution<double> heavy(0.0, 1.5);
    for (auto& x : xs) x = std::round(heavy(gen) * 4.0) / 4.0;  // ties on purpose

    const SummaryStats s = summarize(xs);
    std::shuffle(xs.begin(), xs.end(), gen);
    const SummaryStats t = summarize(xs);
    REQUIRE(t.mean == s.mean);
    REQUIRE(t.stddev == s.stddev);
    REQUIRE(t.q1 == s.q1);
    REQUIRE(t.median == s.median);
    REQUIRE(t.q3 == s.q3);
    REQUIRE(t.outlier_count == s.outlier_count);

    REQUIRE(s.iqr >= 0.0);
    REQUIRE(s.min <= s.whisker_low);
    REQUIRE(s.q1 <= s.median);
    REQUIRE(s.median <= s.q3);
    REQUIRE(s.whisker_high <= s.max);
    // Interpolated quartiles can sit past the last in-fence sample on tiny inputs.
    REQUIRE(s.whisker_low >= s.fence_low);
    REQUIRE(s.whisker_high <= s.fence_high);

    std::size_t outliers = 0;
    double lo = INFINITY;
    double hi = -INFINITY;
    for (double x : xs) {
      if (x < s.q1 - 1.5 * s.iqr || x > s.q3 + 1.5 * s.iqr) {
        ++outliers;
      } else {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
    REQUIRE(outliers == s.outlier_count);
    REQUIRE(lo == s.whisker_low);
    REQUIRE(hi == s.whisker_high);
  }
}

TEST_CASE("Erlang-2 sample median matches the analytic median") {
  RngStream rng(314);
  std::vector<double> xs(100'000);
  for (auto& x : xs) x = rng.exponential(0.01) + rng.exponential(0.01);
  // cascade_quantile(0.5) for r1 = r2 = 100, frozen from mpmath.
  CHECK(summarize(xs).median == doctest::Approx(0.0167834699).epsilon(0.01));
}

TEST_CASE("quantile helpers") {
  const std::vector<double> xs{4, 1, 3, 2};
  CHECK(quantile(xs, 0.0) == 1.0);
  CHECK(quantile(xs, 1.0) == 4.0);
  CHECK(quantile(xs, 0.5) == 2.5);
  CHECK(fraction_at_most(xs, 2.0) == 0.5);
  CHECK_THROWS_AS(quantile(xs, 1.5), ParameterError);
}

TEST_CASE("replication CI") {
  const std::vector<double> same{0.05, 0.05, 0.05};
  const ReplicationCI flat = replication_ci(same);
  CHECK(flat.half_width == 0.0);
  CHECK(flat.point_estimate == 0.05);

  const std::vector<double> two{0.04, 0.06};
  const ReplicationCI ci = replication_ci(two);
  CHECK(ci.point_estimate == doctest::Approx(0.05));
  // t_{0.975,1} = 12.7062047364 (scipy), s = 0.0141421, s / sqrt(2) = 0.01.
  CHECK(ci.half_width == doctest::Approx(0.127062047364).epsilon(1e-9));
  CHECK(ci.n_replications == 2);
  CHECK(ci.contains(0.1));

  CHECK(student_t_critical(0.95, 19) == doctest::Approx(2.093024054408263).epsilon(1e-10));
  CHECK_THROWS_AS(replication_ci(std::vector<double>{0.05}), ParameterError);
}

TEST_CASE("replication CI of the 4G scenario covers the analytic mean") {
  ScenarioConfig cfg = ScenarioConfig::from_milliseconds(30, 20, 6);
  cfg.seed = 17;
  std::vector<double> means;
  for (unsigned r = 0; r < 20; ++r) {
    ScenarioConfig rep = cfg;
    rep.seed = derive_seed(cfg.seed, r);
    means.push_back(run_scenario(rep).mean());
  }
  const ReplicationCI ci = replication_ci(means);
  CHECK(ci.half_width > 0.0);
  CHECK(ci.contains(0.0573170731707317));
}
