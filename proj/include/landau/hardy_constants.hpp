#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "landau/common.hpp"
#include "landau/landau_field.hpp"
#include "landau/quadrature.hpp"

namespace landau::hardy {

/// Which pointwise bound a supremum is taken of. The three pressure kinds are
/// the one-variable reductions in s = x_1/|x|; `velocity_gradient` is
/// |x|^2 |d_j v^k| maximized over the whole unit sphere.
enum class BoundKind {
  pressure,                  // |x|^2 |p|
  pressure_gradient_axial,   // |x|^2 |x_i d_1 p| <= 4|c s^3 - 3c^2 s^2 + 3cs + c^2 - 2| / |c - s|^3
  pressure_gradient_transverse,  // |x|^2 |x_i d_2 p| <= 4|c| |s^2 - 3cs + 2| / |c - s|^3
  velocity_gradient,
};

struct BoundComponent {
  BoundKind kind = BoundKind::velocity_gradient;
  int j = 0;  // derivative direction (0-based)
  int k = 0;  // velocity component (0-based)

  static BoundComponent gradient(int j, int k) { return {BoundKind::velocity_gradient, j, k}; }
};

struct SupOptions {
  int samples = 10000;  // dense grid in s = x_1/|x|
  int azimuth = 16;     // rounded up to a multiple of 8
  double tolerance = 1e-10;
};

struct SupResult {
  double value = 0.0;
  double s_at_max = 0.0;
  double phi_at_max = 0.0;
  /// Supremum restricted to the half-plane x_3 = 0, x_2 >= 0 (phi = 0) plus
  /// its mirror (phi = pi); differs from `value` when the bound is not a
  /// function of s alone.
  double planar_value = 0.0;
};

SupResult sup_directional(const LandauParams& params, BoundComponent component,
                          const SupOptions& options = {});

struct ConstantTable {
  double c = 0.0;
  double k_p = 0.0;
  double k_axial = 0.0;        // printed as k_{i,1}
  double k_transverse = 0.0;   // printed as k_{i,2}
  Mat3 K_jk{};                 // K_jk[j][k] bounds |x|^2 |d_j v^k|
  Mat3 planar_jk{};
  double K_tilde = 0.0;
  double K = 0.0;  // 12 * K_tilde
};

ConstantTable build_constant_table(const LandauParams& params, const SupOptions& options = {});

/// K(c) alone.
double coupling_constant(const LandauParams& params, const SupOptions& options = {});

/// Root of K(c) = 1 on (1, 1e6) by bisection in log(c - 1); throws
/// BracketError when K(1e6) >= 1 or the verification grid above the root
/// contains a point with K >= 1.
double find_c0(double tolerance);

/// find_c0(1e-8), computed once per process.
double threshold_c0();

void write_sweep_header(std::ostream& out);
void write_sweep_row(std::ostream& out, const ConstantTable& table, const std::string& flag = "");

// --- vector fields for the Hardy-type inequalities -------------------------

enum class DecayClass { compact, gaussian };

struct SampledVectorField {
  std::string name;
  std::function<Vec3(const Vec3&)> value;
  std::function<Mat3(const Vec3&)> gradient;  // [j][k] = d_j w^k
  Vec3 center{};
  double extent = 1.0;  // the field vanishes (or is negligible) beyond |x - center| > extent
  DecayClass decay = DecayClass::gaussian;
};

/// a * exp(-|x - x0|^2 / sigma^2)
SampledVectorField gaussian_field(Vec3 center, double sigma, Vec3 amplitude);
/// g(|x|) (1, 1, 1) with g(r) = exp(-r^2 / sigma^2)
SampledVectorField radial_gaussian_field(double sigma);
/// a * exp(-1 / (1 - |x - x0|^2 / R^2)) on the ball, zero outside
SampledVectorField bump_field(Vec3 center, double support_radius, Vec3 amplitude);
/// (a x (x - x0)) exp(-|x - x0|^2 / sigma^2); divergence free
SampledVectorField swirl_field(Vec3 center, double sigma, Vec3 axis);
/// ((x - x0) . e) a exp(-|x - x0|^2 / sigma^2)
SampledVectorField dipole_field(Vec3 center, double sigma, Vec3 direction, Vec3 amplitude);

/// Twenty fields mixing the families above at several centers and scales.
std::vector<SampledVectorField> standard_field_suite();

struct FieldIntegrals {
  double weighted_l2 = 0.0;  // int |w|^2 / |x|^2
  double dirichlet = 0.0;    // int |grad w|^2
  double cross = 0.0;        // int w . (w . grad) v_c   (zero when no params given)
};

/// Quadrature settings for the field integrals; looser than the library
/// default because compactly supported bumps converge sub-exponentially.
inline quadrature::AdaptiveOptions field_quadrature() {
  quadrature::AdaptiveOptions o;
  o.rel_tolerance = 1e-8;
  o.max_levels = 5;
  return o;
}

FieldIntegrals field_integrals(const SampledVectorField& w, const LandauParams* params,
                               const quadrature::AdaptiveOptions& options = field_quadrature());

/// int |w|^2/|x|^2 / int |grad w|^2; at most 4 by the classical Hardy inequality.
double hardy_ratio(const SampledVectorField& w,
                   const quadrature::AdaptiveOptions& options = field_quadrature());

/// |int w . (w . grad) v_c| / int |grad w|^2; at most K(c).
double cross_term_ratio(const LandauParams& params, const SampledVectorField& w,
                        const quadrature::AdaptiveOptions& options = field_quadrature());

}  // namespace landau::hardy
