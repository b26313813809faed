#pragma once

#include "authsim/sim_kernel.hpp"

namespace authsim::oracle {

// Arrival rate and the two service rates of the tandem, all per second.
struct CascadeParams {
  double lambda = 0.0;
  double mu1 = 0.0;  // 1 / link latency
  double mu2 = 0.0;  // 1 / auth service time

  static CascadeParams from_times(double lambda, Seconds link_latency, Seconds service_time) {
    return {lambda, 1.0 / link_latency, 1.0 / service_time};
  }
};

double utilization(double lambda, double mu);

// M/M/1 mean sojourn 1 / (mu - lambda). Throws StabilityError if lambda >= mu.
Seconds mm1_mean_sojourn(double lambda, double mu);

// Sum of both stage sojourns. Throws StabilityError naming the first
// unstable station.
Seconds cascade_mean_sojourn(const CascadeParams& p);

// The tandem sojourn is hypoexponential with rates r1 = mu1 - lambda and
// r2 = mu2 - lambda; the Erlang-2 form is used once the rates agree to 1e-9
// relative.
double cascade_sojourn_cdf(Seconds t, const CascadeParams& p);

// Inverse of cascade_sojourn_cdf by bisection, relative tolerance 1e-9 or
// better. Throws ParameterError unless 0 < q < 1.
Seconds cascade_quantile(double q, const CascadeParams& p);

// Hypoexponential CDF for explicit rates, no stability checks.
double hypoexponential_cdf(Seconds t, double r1, double r2);

}  // namespace authsim::oracle
