#include "landau/fit.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace landau::fit {

FitResult fit_power_law(std::span<const double> t, std::span<const double> value, double t_min,
                        double t_max) {
  if (t.size() != value.size()) throw std::invalid_argument("time and value columns differ in length");
  if (!(t_min < t_max) || !(t_min > 0.0))
    throw std::invalid_argument(fmt::format("degenerate fit window [{}, {}]", t_min, t_max));
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min || t[i] > t_max) continue;
    if (!(value[i] > 0.0))
      throw std::invalid_argument(fmt::format("non-positive value {} at t = {}", value[i], t[i]));
    lx.push_back(std::log(t[i]));
    ly.push_back(std::log(value[i]));
  }
  const int n = static_cast<int>(lx.size());
  if (n < kMinFitPoints)
    throw std::invalid_argument(
        fmt::format("fit window [{}, {}] holds {} samples, need {}", t_min, t_max, n, kMinFitPoints));

  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit window contains a single distinct time");

  FitResult r;
  r.exponent = sxy / sxx;
  r.prefactor = std::exp(my - r.exponent * mx);
  double ss_res = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = ly[i] - (my + r.exponent * (lx[i] - mx));
    ss_res += e * e;
  }
  r.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  r.t_min = t_min;
  r.t_max = t_max;
  r.n_points = n;
  r.valid = true;
  if (r.r_squared < kMinRSquared)
    r.warning = fmt::format("r^2 = {:.4f} < {}: window may lie outside the algebraic regime",
                            r.r_squared, kMinRSquared);
  return r;
}

std::vector<double> running_mean(std::span<const double> t, std::span<const double> f) {
  if (t.size() != f.size()) throw std::invalid_argument("time and value columns differ in length");
  std::vector<double> out(t.size());
  if (t.empty()) return out;
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw std::invalid_argument("time column is not strictly increasing");
  double integral = t[0] * f[0];
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0) integral += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
    out[i] = t[i] > 0.0 ? integral / t[i] : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace landau::fit
