#pragma once

#include <span>

namespace zeeman {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares of y on x. Needs at least two distinct x values.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Unweighted least-squares slope of log(y) against log(x). All values must be
/// finite and positive.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

}  // namespace zeeman
