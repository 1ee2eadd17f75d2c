#pragma once

#include <span>
#include <vector>

namespace dimlab {

// Least-squares fit of log(count) against log(1/scale); the slope stands in
// for a (lower box-counting) dimension.
struct DimEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<double> scales;      // strictly decreasing
  std::vector<double> log_counts;  // matching log(count)
};

// scales strictly decreasing, counts > 0, at least 3 points. Throws
// InsufficientData otherwise.
DimEstimate fit_log_log(std::span<const double> scales, std::span<const double> counts);

// Same as fit_log_log but drops zero counts first.
DimEstimate fit_log_log_nonzero(std::span<const double> scales, std::span<const double> counts);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace dimlab
