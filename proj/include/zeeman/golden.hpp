#pragma once

#include <cmath>
#include <utility>

namespace zeeman {

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search for a minimum of `f` on [lo, hi]. Stops once the
/// bracket is narrower than `tolerance` or after `max_evaluations`.
template <typename Function>
ScalarMinimum golden_section(Function&& f, double lo, double hi, double tolerance,
                             int max_evaluations = 200) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  int evals = 2;
  while (b - a > tolerance && evals < max_evaluations) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  return fc <= fd ? ScalarMinimum{c, fc, evals} : ScalarMinimum{d, fd, evals};
}

}  // namespace zeeman
