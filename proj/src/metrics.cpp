#include "authsim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "authsim/errors.hpp"

namespace authsim::metrics {

double sorted_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw EmptySampleError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError(fmt::format("quantile level {} outside [0, 1]", p));
  const double pos = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double quantile(std::span<const double> samples, double p) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted_quantile(sorted, p);
}

double fraction_at_most(std::span<const double> samples, double threshold) {
  if (samples.empty()) throw EmptySampleError("fraction of an empty sample");
  const auto hits = std::count_if(samples.begin(), samples.end(),
                                  [threshold](double x) { return x <= threshold; });
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

SummaryStats summarize(std::span<const double> samples) {
  if (samples.empty()) throw EmptySampleError("cannot summarize an empty sample");

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());

  SummaryStats s;
  s.count = sorted.size();
  // Shifted by the minimum and summed in sorted order: order-independent, and
  // exact for constant samples.
  double shifted = 0.0;
  for (double x : sorted) shifted += x - sorted.front();
  s.mean = sorted.front() + shifted / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double x : sorted) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  s.min = sorted.front();
  s.max = sorted.back();
  s.q1 = sorted_quantile(sorted, 0.25);
  s.median = sorted_quantile(sorted, 0.5);
  s.q3 = sorted_quantile(sorted, 0.75);
  s.iqr = s.q3 - s.q1;
  s.fence_low = s.q1 - 1.5 * s.iqr;
  s.fence_high = s.q3 + 1.5 * s.iqr;

  const auto first_in = std::lower_bound(sorted.begin(), sorted.end(), s.fence_low);
  const auto last_in = std::upper_bound(sorted.begin(), sorted.end(), s.fence_high);
  // q1 and q3 are always inside the fences, so at least one sample is too.
  s.whisker_low = *first_in;
  s.whisker_high = *(last_in - 1);
  s.outlier_count = static_cast<std::size_t>((first_in - sorted.begin()) + (sorted.end() - last_in));
  return s;
}

double student_t_critical(double confidence, std::size_t dof) {
  if (dof == 0) throw ParameterError("Student-t critical value needs dof >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ParameterError("confidence must lie in (0, 1)");
  const boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 0.5 + 0.5 * confidence);
}

ReplicationCI replication_ci(std::span<const double> per_rep_means, double confidence) {
  const std::size_t n = per_rep_means.size();
  if (n < 2) throw ParameterError(fmt::format("replication CI needs >= 2 means, got {}", n));

  const double base = per_rep_means.front();
  double shifted = 0.0;
  for (double x : per_rep_means) shifted += x - base;
  const double mean = base + shifted / static_cast<double>(n);
  double ss = 0.0;
  for (double x : per_rep_means) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  ReplicationCI ci;
  ci.point_estimate = mean;
  ci.half_width = student_t_critical(confidence, n - 1) * sd / std::sqrt(static_cast<double>(n));
  ci.confidence = confidence;
  ci.n_replications = n;
  return ci;
}

}  // namespace authsim::metrics
