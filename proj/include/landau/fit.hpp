#pragma once

#include <span>
#include <string>
#include <vector>

namespace landau::fit {

/// value ~ prefactor * t^exponent on [t_min, t_max].
struct FitResult {
  double exponent = 0.0;
  double prefactor = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  double r_squared = 0.0;
  int n_points = 0;
  bool valid = false;  // n_points >= 8
  std::string warning;
};

inline constexpr int kMinFitPoints = 8;
inline constexpr double kMinRSquared = 0.98;

/// Least squares on (log t, log value) over samples with t_min <= t <= t_max.
/// Throws std::invalid_argument for an empty or inverted window, fewer than
/// kMinFitPoints samples, or a non-positive sample inside the window.
FitResult fit_power_law(std::span<const double> t, std::span<const double> value, double t_min,
                        double t_max);

/// Trapezoidal running mean (1/t) int_0^t f, with f extended to t = 0 by its
/// first sample when t[0] > 0. Entry i is NaN if t[i] == 0.
std::vector<double> running_mean(std::span<const double> t, std::span<const double> f);

}  // namespace landau::fit
