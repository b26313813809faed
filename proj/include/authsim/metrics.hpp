#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace authsim::metrics {

// Box-plot summary of a delay sample, all values in seconds.
//
// Quartiles use linear interpolation at position (n - 1) * p over the sorted
// sample. The fences sit 1.5 * IQR beyond the quartiles; the whiskers are the
// most extreme samples inside the fences, and anything outside is counted as
// an outlier.
struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1); 0 when n == 1
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double fence_low = 0.0;
  double fence_high = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::size_t outlier_count = 0;
  double max = 0.0;
};

struct ReplicationCI {
  double point_estimate = 0.0;
  double half_width = 0.0;
  double confidence = 0.95;
  std::size_t n_replications = 0;

  double lower() const noexcept { return point_estimate - half_width; }
  double upper() const noexcept { return point_estimate + half_width; }
  bool contains(double value) const noexcept { return value >= lower() && value <= upper(); }
};

// Throws EmptySampleError on an empty sample.
SummaryStats summarize(std::span<const double> samples);

// Linear-interpolation quantile of an already sorted sample.
double sorted_quantile(std::span<const double> sorted, double p);

// Sorts a copy; p in [0, 1].
double quantile(std::span<const double> samples, double p);

// Fraction of samples <= threshold.
double fraction_at_most(std::span<const double> samples, double threshold);

// Mean of the per-replication means with a Student-t interval.
// Throws ParameterError when fewer than two means are given.
ReplicationCI replication_ci(std::span<const double> per_rep_means, double confidence = 0.95);

// Two-sided Student-t critical value t_{(1+confidence)/2, dof}.
double student_t_critical(double confidence, std::size_t dof);

}  // namespace authsim::metrics
