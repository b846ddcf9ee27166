#include "landau/landau_field.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace landau {

LandauParams::LandauParams(double c) : c_(c) {
  if (!std::isfinite(c) || std::abs(c) <= 1.0 + 1e-9)
    throw std::invalid_argument(fmt::format("Landau parameter requires |c| > 1, got c = {}", c));
}

TestFunction::TestFunction(Point3 center, double support_radius, double amplitude)
    : center_(center), support_radius_(support_radius), amplitude_(amplitude) {
  if (!(support_radius > 0.0)) throw std::invalid_argument("test function radius must be positive");
}

double TestFunction::value(const Point3& x) const {
  const Vec3 d = x - center_;
  const double q = dot(d, d) / (support_radius_ * support_radius_);
  if (q >= 1.0) return 0.0;
  return amplitude_ * std::exp(-1.0 / (1.0 - q));
}

Vec3 TestFunction::gradient(const Point3& x) const {
  const Vec3 d = x - center_;
  const double r2 = support_radius_ * support_radius_;
  const double q = dot(d, d) / r2;
  if (q >= 1.0) return {0.0, 0.0, 0.0};
  const double one_minus = 1.0 - q;
  const double phi = amplitude_ * std::exp(-1.0 / one_minus);
  const double factor = -phi / (one_minus * one_minus) * 2.0 / r2;
  return factor * d;
}

namespace field {

namespace {

struct Geometry {
  double r;
  double denom;  // c|x| - x_1
};

Geometry geometry(const LandauParams& params, const Point3& x) {
  const double r = radius(x);
  if (!(r > 0.0)) throw SingularPointError();
  return {r, params.c() * r - x[0]};
}

}  // namespace

Vec3 eval_velocity(const LandauParams& params, const Point3& x) {
  const double c = params.c();
  const auto [r, den] = geometry(params, x);
  const double scale = 2.0 / (r * den * den);
  const double t = c * x[0] - r;
  return {scale * (c * r * r - 2.0 * x[0] * r + c * x[0] * x[0]), scale * x[1] * t,
          scale * x[2] * t};
}

double eval_pressure(const LandauParams& params, const Point3& x) {
  const auto [r, den] = geometry(params, x);
  return 4.0 * (params.c() * x[0] - r) / (r * den * den);
}

Vec3 eval_pressure_gradient(const LandauParams& params, const Point3& x) {
  const double c = params.c();
  const auto [r, den] = geometry(params, x);
  const double x1 = x[0];
  const double pre = 4.0 / (r * r * r * den * den * den);
  const double g1 = (c * c - 2.0) * r * r * r + 3.0 * c * r * r * x1 - 3.0 * c * c * r * x1 * x1 +
                    c * x1 * x1 * x1;
  const double transverse = c * (2.0 * r * r - 3.0 * c * r * x1 + x1 * x1);
  return {pre * g1, pre * x[1] * transverse, pre * x[2] * transverse};
}

Mat3 eval_velocity_gradient(const LandauParams& params, const Point3& x) {
  const double c = params.c();
  const auto [r, den] = geometry(params, x);
  const double p = 4.0 * (c * x[0] - r) / (r * den * den);
  const Vec3 gp = eval_pressure_gradient(params, x);
  Mat3 g{};
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      g[j][k] = 0.5 * x[k] * gp[j] + (j == k ? 0.5 * p : 0.0);
    }
    // d_j of 2 / (c|x| - x_1)
    const double d_den = c * x[j] / r - (j == 0 ? 1.0 : 0.0);
    g[j][0] += -2.0 * d_den / (den * den);
  }
  return g;
}

Vec3 eval_vector_potential(const LandauParams& params, const Point3& x) {
  const auto [r, den] = geometry(params, x);
  return {0.0, -2.0 * x[2] / den, 2.0 * x[1] / den};
}

Mat3 eval_vector_potential_gradient(const LandauParams& params, const Point3& x) {
  const double c = params.c();
  const auto [r, den] = geometry(params, x);
  const Vec3 q{0.0, -x[2], x[1]};
  Mat3 g{};
  for (int j = 0; j < 3; ++j) {
    const double d_den = c * x[j] / r - (j == 0 ? 1.0 : 0.0);
    for (int b = 0; b < 3; ++b) g[j][b] = -2.0 * q[b] * d_den / (den * den);
  }
  g[2][1] += -2.0 / den;
  g[1][2] += 2.0 / den;
  return g;
}

StationaryResidual stationary_residual(const LandauParams& params, const Point3& x,
                                       double rel_step) {
  const double r = radius(x);
  if (!(r > 0.0)) throw SingularPointError();

  // second derivative d_j d_j v^k from central differences of the gradient
  auto laplacian_at = [&](double h) {
    Vec3 lap{0.0, 0.0, 0.0};
    for (int j = 0; j < 3; ++j) {
      Point3 xp = x;
      Point3 xm = x;
      xp[j] += h;
      xm[j] -= h;
      const Mat3 gp = eval_velocity_gradient(params, xp);
      const Mat3 gm = eval_velocity_gradient(params, xm);
      for (int k = 0; k < 3; ++k) lap[k] += (gp[j][k] - gm[j][k]) / (2.0 * h);
    }
    return lap;
  };

  const double h = rel_step * r;
  const Vec3 d0 = laplacian_at(h);
  const Vec3 d1 = laplacian_at(0.5 * h);
  const Vec3 d2 = laplacian_at(0.25 * h);
  const Vec3 r1 = (1.0 / 3.0) * (4.0 * d1 - d0);
  const Vec3 r2 = (1.0 / 3.0) * (4.0 * d2 - d1);
  const Vec3 lap = (1.0 / 15.0) * (16.0 * r2 - r1);

  StationaryResidual out;
  out.laplacian = lap;
  const Vec3 v = eval_velocity(params, x);
  const Mat3 g = eval_velocity_gradient(params, x);
  for (int k = 0; k < 3; ++k) out.advection[k] = v[0] * g[0][k] + v[1] * g[1][k] + v[2] * g[2][k];
  out.pressure_gradient = eval_pressure_gradient(params, x);
  out.residual = out.advection + out.pressure_gradient - lap;
  out.extrapolation_error = norm(r2 - r1);
  out.converged = norm(r2 - r1) <= norm(d1 - d0) + 1e-300;
  return out;
}

double b_closed_form(const LandauParams& params) {
  const double c = params.c();
  const double prefactor = 8.0 * std::numbers::pi * c / (3.0 * (c * c - 1.0));
  double bracket = 0.0;
  if (std::abs(c) > 50.0) {
    // 2 + 6c^2 - 3c(c^2 - 1) log((c+1)/(c-1)) = 6 + 12 sum_{n>=1} u^{2n} / ((2n+1)(2n+3)), u = 1/c
    const double u2 = 1.0 / (c * c);
    double term = 1.0;
    double sum = 0.0;
    for (int n = 1; n <= 8; ++n) {
      term *= u2;
      sum += term / ((2.0 * n + 1.0) * (2.0 * n + 3.0));
    }
    bracket = 6.0 + 12.0 * sum;
  } else {
    // log((c+1)/(c-1)) = log1p(2/(c-1)), valid for both signs of c
    const double log_term = std::log1p(2.0 / (c - 1.0));
    bracket = 2.0 + 6.0 * c * c - 3.0 * c * (c * c - 1.0) * log_term;
  }
  return prefactor * bracket;
}

PairingResult distributional_pairing(const LandauParams& params, const TestFunction& phi,
                                     const quadrature::AdaptiveOptions& options) {
  auto integrand = [&](const Vec3& x, std::span<double> out) {
    const Vec3 dphi = phi.gradient(x);
    if (dphi[0] == 0.0 && dphi[1] == 0.0 && dphi[2] == 0.0) {
      for (double& o : out) o = 0.0;
      return;
    }
    const Vec3 v = eval_velocity(params, x);
    const Mat3 g = eval_velocity_gradient(params, x);
    const double p = eval_pressure(params, x);
    const double v_dot = dot(v, dphi);
    for (int k = 0; k < 3; ++k) {
      const double grad_dot = g[0][k] * dphi[0] + g[1][k] * dphi[1] + g[2][k] * dphi[2];
      out[k] = grad_dot - v[k] * v_dot - p * dphi[k];
    }
    out[3] = v_dot;
  };
  const double extent = radius(phi.center()) + phi.support_radius();
  const auto res = quadrature::integrate_ball_adaptive(integrand, 4, extent, options);
  PairingResult out;
  for (int k = 0; k < 3; ++k) {
    out.momentum[k] = res.values[k];
    out.momentum_scale[k] = res.magnitudes[k];
  }
  out.divergence = res.values[3];
  out.divergence_scale = res.magnitudes[3];
  out.levels = res.levels;
  return out;
}

double b_by_quadrature(const LandauParams& params, const TestFunction& phi,
                       const quadrature::AdaptiveOptions& options) {
  const double phi0 = phi.value_at_origin();
  if (phi0 == 0.0) throw std::invalid_argument("test function must not vanish at the origin");
  return distributional_pairing(params, phi, options).momentum[0] / phi0;
}

void write_ray_csv(std::ostream& out, const LandauParams& params, const Vec3& direction,
                   std::span<const double> radii) {
  const double len = norm(direction);
  if (!(len > 0.0)) throw std::invalid_argument("ray direction must be nonzero");
  const Vec3 unit = (1.0 / len) * direction;
  out << "r,v1,v2,v3,p\n";
  for (double r : radii) {
    const Point3 x = r * unit;
    const Vec3 v = eval_velocity(params, x);
    fmt::print(out, "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r, v[0], v[1], v[2],
               eval_pressure(params, x));
  }
}

}  // namespace field
}  // namespace landau
