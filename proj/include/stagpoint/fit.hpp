#pragma once

#include <span>

namespace stagpoint {

/// y ~ constant * x^exponent * |ln x|^log_power with log_power known.
struct PowerFit {
  double exponent = 0.0;
  double constant = 0.0;
  double rms = 0.0;  // residual in ln y
  int n = 0;
};

/// Weighted least squares on ln y - log_power ln|ln x| = ln C + e ln x.
/// Empty weights mean uniform. Throws InvalidInput for fewer than two
/// usable points (x, y > 0).
PowerFit fit_power_law(std::span<const double> x, std::span<const double> y, int log_power = 0,
                       std::span<const double> weights = {});

/// Same model with the exponent held fixed; returns the geometric-mean constant.
double fit_constant(std::span<const double> x, std::span<const double> y, double exponent, int log_power = 0);

/// Straight line y = intercept + slope * x by least squares.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace stagpoint
