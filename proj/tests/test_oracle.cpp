#include <doctest.h>

#include <cmath>

#include "authsim/errors.hpp"
#include "authsim/oracle.hpp"

using namespace authsim;
using namespace authsim::oracle;

namespace {

// Independent route to the tandem sojourn CDF: P(X + Y <= t) for independent
// exponentials, by composite Simpson over the density of X.
double convolution_cdf(double t, double r1, double r2, int panels = 4000) {
  auto f = [&](double s) { return r1 * std::exp(-r1 * s) * (1.0 - std::exp(-r2 * (t - s))); };
  const double h = t / panels;
  double acc = f(0.0) + f(t);
  for (int i = 1; i < panels; ++i) acc += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

const CascadeParams kFastLinkAt80{80.0, 200.0, 1000.0 / 6.0};

}  // namespace

TEST_CASE("mm1 mean sojourn") {
  CHECK(mm1_mean_sojourn(30, 50) == doctest::Approx(0.05));
  CHECK(mm1_mean_sojourn(0, 1000.0 / 6.0) == doctest::Approx(0.006));
  CHECK(mm1_mean_sojourn(100, 500) == doctest::Approx(0.0025));
  CHECK_THROWS_AS(mm1_mean_sojourn(50, 50), StabilityError);
}

TEST_CASE("cascade mean sojourn") {
  CHECK(cascade_mean_sojourn({100, 500, 1000.0 / 6.0}) == doctest::Approx(0.0175).epsilon(1e-9));
  // 1/20 + 1/(166.667 - 30), evaluated with mpmath.
  CHECK(cascade_mean_sojourn({30, 50, 1000.0 / 6.0}) == doctest::Approx(0.0573170731707317).epsilon(1e-12));
  CHECK(cascade_mean_sojourn({0, 50, 1000.0 / 6.0}) == doctest::Approx(0.020 + 0.006));

  try {
    cascade_mean_sojourn({60, 50, 1000.0 / 6.0});
    FAIL("expected StabilityError");
  } catch (const StabilityError& e) {
    CHECK(e.station().find("station 1") != std::string::npos);
    CHECK(e.utilization() == doctest::Approx(1.2));
  }
  CHECK_THROWS_AS(cascade_mean_sojourn({170, 500, 1000.0 / 6.0}), StabilityError);
}

TEST_CASE("cascade CDF values") {
  CHECK(cascade_sojourn_cdf(0.0, kFastLinkAt80) == 0.0);
  // Frozen from mpmath quadrature (30 digits): 0.996667008060771...
  CHECK(cascade_sojourn_cdf(0.08, kFastLinkAt80) == doctest::Approx(0.996667008060771).epsilon(1e-12));
  CHECK(cascade_sojourn_cdf(0.08, kFastLinkAt80) ==
        doctest::Approx(convolution_cdf(0.08, 120.0, 1000.0 / 6.0 - 80.0)).epsilon(1e-9));
  // Erlang-2 with r = 100: 1 - 2/e.
  CHECK(hypoexponential_cdf(0.01, 100.0, 100.0) == doctest::Approx(1.0 - 2.0 * std::exp(-1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(cascade_sojourn_cdf(-1e-3, kFastLinkAt80), ParameterError);
}

TEST_CASE("property: CDF agrees with quadrature over random parameters") {
  RngStream rng(2024);
  for (int i = 0; i < 40; ++i) {
    const double mu1 = 20.0 + 500.0 * rng.uniform_open();
    const double mu2 = 20.0 + 500.0 * rng.uniform_open();
    const double lambda = 0.95 * std::min(mu1, mu2) * rng.uniform_open();
    const CascadeParams p{lambda, mu1, mu2};
    const double t = 3.0 * cascade_mean_sojourn(p) * rng.uniform_open();
    CAPTURE(mu1);
    CAPTURE(mu2);
    CAPTURE(lambda);
    CHECK(cascade_sojourn_cdf(t, p) == doctest::Approx(convolution_cdf(t, mu1 - lambda, mu2 - lambda)).epsilon(1e-8));
  }
}

TEST_CASE("CDF is monotone and reaches one") {
  const double r_min = std::min(kFastLinkAt80.mu1, kFastLinkAt80.mu2) - kFastLinkAt80.lambda;
  double prev = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double f = cascade_sojourn_cdf(i * 20.0 / r_min / 2000.0, kFastLinkAt80);
    REQUIRE(f >= prev);
    prev = f;
  }
  CHECK(prev > 1.0 - 1e-4);
}

TEST_CASE("mean equals the integral of the survival function") {
  for (const CascadeParams& p : {kFastLinkAt80, CascadeParams{30, 50, 1000.0 / 6.0}, CascadeParams{10, 100, 100}}) {
    const double r1 = p.mu1 - p.lambda;
    const double r2 = p.mu2 - p.lambda;
    const double upper = 20.0 / std::min(r1, r2);
    constexpr int panels = 200000;
    const double h = upper / panels;
    double acc = 0.0;
    for (int i = 0; i <= panels; ++i) {
      const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * (1.0 - cascade_sojourn_cdf(i * h, p));
    }
    CHECK(acc * h / 3.0 == doctest::Approx(cascade_mean_sojourn(p)).epsilon(1e-6));
  }
}

TEST_CASE("general form converges to Erlang-2 as rates merge") {
  const double r1 = 100.0;
  for (double rel : {1e-6, -1e-6}) {
    const double r2 = r1 * (1.0 + rel);
    for (double t : {0.001, 0.01, 0.02, 0.05, 0.1}) {
      const double erlang = -std::expm1(-r1 * t) - r1 * t * std::exp(-r1 * t);
      CHECK(std::abs(hypoexponential_cdf(t, r1, r2) - erlang) < 1e-6);
    }
  }
}

TEST_CASE("quantiles") {
  // Erlang-2 median solved by mpmath: 0.0167834699001666.
  const CascadeParams erlang{0.0, 100.0, 100.0};
  CHECK(cascade_quantile(0.5, erlang) == doctest::Approx(0.0167834699001666).epsilon(1e-9));
  // Q3 at 80 req/s, 5 ms link, 6 ms server (mpmath bisection): 0.0267195594916030.
  CHECK(cascade_quantile(0.75, kFastLinkAt80) == doctest::Approx(0.026719559491603).epsilon(1e-9));
  // P99.9 at 30 req/s, 20 ms link, 6 ms server: 0.353298964209852.
  CHECK(cascade_quantile(0.999, {30, 50, 1000.0 / 6.0}) == doctest::Approx(0.353298964209852).epsilon(1e-9));
  CHECK(cascade_quantile(1e-9, kFastLinkAt80) < 1e-4);

  CHECK_THROWS_AS(cascade_quantile(0.0, kFastLinkAt80), ParameterError);
  CHECK_THROWS_AS(cascade_quantile(1.0, kFastLinkAt80), ParameterError);
}

TEST_CASE("quantile round trip") {
  for (const CascadeParams& p : {kFastLinkAt80, CascadeParams{30, 50, 1000.0 / 6.0}, CascadeParams{0, 100, 100}}) {
    for (int k = 1; k <= 9; ++k) {
      const double q = k / 10.0;
      CHECK(std::abs(cascade_sojourn_cdf(cascade_quantile(q, p), p) - q) <= 1e-8);
    }
  }
}

TEST_CASE("utilization") {
  CHECK(utilization(30, 50) == doctest::Approx(0.6));
  CHECK(utilization(0, 50) == 0.0);
  CHECK(utilization(50, 50) == 1.0);
}
