#pragma once

#include <cmath>
#include <utility>

namespace landau {

/// Golden-section search for the maximum of a unimodal f on [a, b].
/// Returns (argmax, max). Stops when the bracket is narrower than tol.
template <typename F>
std::pair<double, double> golden_maximize(F&& f, double a, double b, double tol = 1e-10,
                                          int max_iterations = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iterations && (b - a) > tol; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  // the endpoints are candidates too: suprema of the bounds often sit at s = +-1
  double best_x = 0.5 * (a + b);
  double best = f(best_x);
  for (double x : {a, b}) {
    const double fx = f(x);
    if (fx > best) {
      best = fx;
      best_x = x;
    }
  }
  return {best_x, best};
}

}  // namespace landau
