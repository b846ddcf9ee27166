#pragma once

#include <iosfwd>
#include <span>

#include "landau/common.hpp"
#include "landau/quadrature.hpp"

namespace landau {

/// Parameter of the Landau family; |c| > 1.
class LandauParams {
 public:
  explicit LandauParams(double c);
  double c() const { return c_; }

 private:
  double c_;
};

using Point3 = Vec3;

inline double radius(const Point3& x) { return norm(x); }

/// C_c^infinity bump  A * exp(-1 / (1 - |x - x0|^2 / R^2))  supported in |x - x0| < R.
class TestFunction {
 public:
  TestFunction(Point3 center, double support_radius, double amplitude = 1.0);

  double value(const Point3& x) const;
  Vec3 gradient(const Point3& x) const;
  double value_at_origin() const { return value({0.0, 0.0, 0.0}); }

  const Point3& center() const { return center_; }
  double support_radius() const { return support_radius_; }

 private:
  Point3 center_;
  double support_radius_;
  double amplitude_;
};

namespace field {

Vec3 eval_velocity(const LandauParams& params, const Point3& x);
double eval_pressure(const LandauParams& params, const Point3& x);
Vec3 eval_pressure_gradient(const LandauParams& params, const Point3& x);

/// Analytic gradient, result[j][k] = d v^k / d x_j, from the representation
/// v^k = p x_k / 2 + 2 delta_{k1} / (c|x| - x_1).
Mat3 eval_velocity_gradient(const LandauParams& params, const Point3& x);

/// Vector potential A = 2 (0, -x_3, x_2) / (c|x| - x_1) with curl A = v_c;
/// bounded and homogeneous of degree 0.
Vec3 eval_vector_potential(const LandauParams& params, const Point3& x);
/// result[j][b] = d A^b / d x_j.
Mat3 eval_vector_potential_gradient(const LandauParams& params, const Point3& x);

struct StationaryResidual {
  Vec3 laplacian{};          // Delta v
  Vec3 advection{};          // (v . grad) v
  Vec3 pressure_gradient{};  // grad p
  Vec3 residual{};           // -Delta v + (v . grad) v + grad p
  double extrapolation_error = 0.0;
  bool converged = true;  // false when successive Richardson levels diverge
};

/// Residual of the stationary equations at x. The Laplacian comes from central
/// differences of the analytic gradient with two Richardson levels; the step
/// is rel_step * |x|.
StationaryResidual stationary_residual(const LandauParams& params, const Point3& x,
                                       double rel_step = 2e-3);

/// Force strength b(c). For |c| > 50 the bracket is summed as a series in 1/c^2.
double b_closed_form(const LandauParams& params);

struct PairingResult {
  /// Integral of grad v^k . grad phi - v^k v . grad phi - p d_k phi for k = 1, 2, 3.
  Vec3 momentum{};
  /// Integral of v . grad phi.
  double divergence = 0.0;
  /// Integrals of the absolute integrands, used as error scales.
  Vec3 momentum_scale{};
  double divergence_scale = 0.0;
  int levels = 0;
};

/// Pairs the Landau solution with a test function by spherical product
/// quadrature centered at the singular point.
PairingResult distributional_pairing(const LandauParams& params, const TestFunction& phi,
                                     const quadrature::AdaptiveOptions& options = {});

/// b(c) recovered as the k = 1 pairing divided by phi(0).
double b_by_quadrature(const LandauParams& params, const TestFunction& phi,
                       const quadrature::AdaptiveOptions& options = {});

/// CSV dump along the ray t * direction: columns r, v1, v2, v3, p.
void write_ray_csv(std::ostream& out, const LandauParams& params, const Vec3& direction,
                   std::span<const double> radii);

}  // namespace field
}  // namespace landau
