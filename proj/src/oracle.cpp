#include "authsim/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "authsim/errors.hpp"

namespace authsim::oracle {
namespace {

constexpr double kEqualRatesTolerance = 1e-9;

void require_stable(double lambda, double mu, const char* station) {
  if (!(mu > 0.0)) throw ParameterError(fmt::format("{} service rate must be positive", station));
  if (lambda < 0.0) throw ParameterError("arrival rate must be non-negative");
  if (lambda >= mu) throw StabilityError(station, lambda / mu);
}

void require_stable(const CascadeParams& p) {
  require_stable(p.lambda, p.mu1, "station 1 (link)");
  require_stable(p.lambda, p.mu2, "station 2 (auth server)");
}

}  // namespace

double utilization(double lambda, double mu) {
  if (!(mu > 0.0)) throw ParameterError("service rate must be positive");
  return lambda / mu;
}

Seconds mm1_mean_sojourn(double lambda, double mu) {
  require_stable(lambda, mu, "station");
  return 1.0 / (mu - lambda);
}

Seconds cascade_mean_sojourn(const CascadeParams& p) {
  require_stable(p);
  return 1.0 / (p.mu1 - p.lambda) + 1.0 / (p.mu2 - p.lambda);
}

double hypoexponential_cdf(Seconds t, double r1, double r2) {
  if (t < 0.0) throw ParameterError(fmt::format("CDF argument must be >= 0, got {}", t));
  if (t == 0.0) return 0.0;
  if (std::abs(r1 - r2) / std::max(r1, r2) < kEqualRatesTolerance) {
    const double r = 0.5 * (r1 + r2);
    return -std::expm1(-r * t) - r * t * std::exp(-r * t);
  }
  // 1 - (r2 e^{-r1 t} - r1 e^{-r2 t}) / (r2 - r1)
  const double survival = (r2 * std::exp(-r1 * t) - r1 * std::exp(-r2 * t)) / (r2 - r1);
  return std::clamp(1.0 - survival, 0.0, 1.0);
}

double cascade_sojourn_cdf(Seconds t, const CascadeParams& p) {
  if (t < 0.0) throw ParameterError(fmt::format("CDF argument must be >= 0, got {}", t));
  require_stable(p);
  return hypoexponential_cdf(t, p.mu1 - p.lambda, p.mu2 - p.lambda);
}

Seconds cascade_quantile(double q, const CascadeParams& p) {
  if (!(q > 0.0 && q < 1.0)) {
    throw ParameterError(fmt::format("quantile level must lie in (0, 1), got {}", q));
  }
  require_stable(p);
  const double r1 = p.mu1 - p.lambda;
  const double r2 = p.mu2 - p.lambda;

  double lo = 0.0;
  double hi = 1.0 / r1 + 1.0 / r2;
  while (hypoexponential_cdf(hi, r1, r2) < q) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hypoexponential_cdf(mid, r1, r2) < q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace authsim::oracle
