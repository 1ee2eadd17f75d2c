#include "dimlab/regression.hpp"

#include <cmath>
#include <string>

#include "dimlab/error.hpp"

namespace dimlab {

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += e * e;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

DimEstimate fit_log_log(std::span<const double> scales, std::span<const double> counts) {
  if (scales.size() != counts.size()) {
    throw Error(ErrorCode::InvalidArgument, "scales and counts differ in length");
  }
  if (scales.size() < 3) {
    throw Error(ErrorCode::InsufficientData,
                "need at least 3 scales, have " + std::to_string(scales.size()));
  }
  DimEstimate est;
  std::vector<double> x;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (i > 0 && !(scales[i] < scales[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "scales must be strictly decreasing");
    }
    if (!(counts[i] > 0.0)) {
      throw Error(ErrorCode::InsufficientData, "zero count at scale index " + std::to_string(i));
    }
    est.scales.push_back(scales[i]);
    est.log_counts.push_back(std::log(counts[i]));
    x.push_back(-std::log(scales[i]));
  }
  const LineFit fit = least_squares(x, est.log_counts);
  est.slope = fit.slope;
  est.intercept = fit.intercept;
  est.r2 = fit.r2;
  return est;
}

DimEstimate fit_log_log_nonzero(std::span<const double> scales, std::span<const double> counts) {
  std::vector<double> s, c;
  for (std::size_t i = 0; i < scales.size() && i < counts.size(); ++i) {
    if (counts[i] > 0.0) {
      s.push_back(scales[i]);
      c.push_back(counts[i]);
    }
  }
  return fit_log_log(s, c);
}

}  // namespace dimlab
