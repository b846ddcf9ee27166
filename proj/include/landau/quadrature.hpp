#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "landau/common.hpp"

namespace landau::quadrature {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n points on [-1, 1]. Rules are cached per n.
const Rule1D& gauss_legendre(std::size_t n);

/// Composite Gauss-Legendre on [a, b]: `panels` equal panels of `order` points.
Rule1D composite_gauss(double a, double b, std::size_t panels, std::size_t order);

struct SphericalResolution {
  std::size_t radial_panels = 8;
  std::size_t radial_order = 8;
  std::size_t polar = 16;    // Gauss-Legendre points in cos(theta)
  std::size_t azimuth = 16;  // trapezoid points in phi

  SphericalResolution refined() const {
    return {radial_panels * 2, radial_order, polar * 2, azimuth * 2};
  }
};

/// Integrand returning several values at once; the r^2 Jacobian is applied by
/// the rule, so integrands that blow up like 1/|x|^2 at the origin stay bounded.
using MultiIntegrand = std::function<void(const Vec3& x, std::span<double> out)>;

/// Region in spherical coordinates about the origin: the shell
/// r_min <= |x| <= r_max intersected with the cone x.axis >= mu_min |x|.
struct SphericalRegion {
  double r_min = 0.0;
  double r_max = 1.0;
  Vec3 axis{1.0, 0.0, 0.0};  // polar axis, unit length
  double mu_min = -1.0;
};

/// Product rule over `region`. Writes the integrals into `values` and the
/// integrals of |integrand| into `magnitudes`.
void integrate_region(const MultiIntegrand& f, std::size_t n_values, const SphericalRegion& region,
                      const SphericalResolution& res, std::span<double> values,
                      std::span<double> magnitudes);

struct AdaptiveOptions {
  double rel_tolerance = 1e-10;  // relative to the integral of |f|
  int max_levels = 5;
  SphericalResolution start{};
};

struct AdaptiveResult {
  std::vector<double> values;
  std::vector<double> magnitudes;
  std::vector<double> change;  // |I_l - I_{l-1}| of the final refinement
  int levels = 0;
};

/// Refines the product rule by doubling until two successive levels agree;
/// throws QuadratureError when max_levels is exhausted.
AdaptiveResult integrate_adaptive(const MultiIntegrand& f, std::size_t n_values,
                                  const SphericalRegion& region,
                                  const AdaptiveOptions& options = {});

inline AdaptiveResult integrate_ball_adaptive(const MultiIntegrand& f, std::size_t n_values,
                                              double radius, const AdaptiveOptions& options = {}) {
  return integrate_adaptive(f, n_values, SphericalRegion{0.0, radius}, options);
}

/// Smallest region about the origin containing the ball |x - center| <= extent.
SphericalRegion enclosing_region(const Vec3& center, double extent);

}  // namespace landau::quadrature
