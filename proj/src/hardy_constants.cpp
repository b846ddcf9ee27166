#include "landau/hardy_constants.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "landau/golden.hpp"

namespace landau::hardy {

namespace {

int azimuth_count(const SupOptions& options) {
  const int n = std::max(8, options.azimuth);
  return ((n + 7) / 8) * 8;
}

Vec3 sphere_point(double s, double phi) {
  const double q = std::sqrt(std::max(0.0, 1.0 - s * s));
  return {s, q * std::cos(phi), q * std::sin(phi)};
}

double pressure_bound(double c, BoundKind kind, double s) {
  const double d = c - s;
  switch (kind) {
    case BoundKind::pressure:
      return 4.0 * std::abs(c * s - 1.0) / (d * d);
    case BoundKind::pressure_gradient_axial:
      return 4.0 * std::abs(c * s * s * s - 3.0 * c * c * s * s + 3.0 * c * s + c * c - 2.0) /
             std::abs(d * d * d);
    case BoundKind::pressure_gradient_transverse:
      return 4.0 * std::abs(c) * std::abs(s * s - 3.0 * c * s + 2.0) / std::abs(d * d * d);
    case BoundKind::velocity_gradient:
      break;
  }
  return 0.0;
}

// Max over the sampled azimuths of |d_j v^k| on the unit sphere at fixed s.
// Every entry is A(s) + B(s) t(phi) with t in {cos, sin, cos^2, sin^2, sin cos},
// so its extremes sit at multiples of pi/4 and a multiple-of-8 grid is exact.
struct AzimuthMax {
  Mat3 full{};
  Mat3 planar{};
  std::array<std::array<double, 3>, 3> phi{};
};

AzimuthMax azimuth_max(const LandauParams& params, double s, int n_phi) {
  AzimuthMax out;
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  for (int i = 0; i < n_phi; ++i) {
    const double phi = dphi * i;
    const Mat3 g = field::eval_velocity_gradient(params, sphere_point(s, phi));
    const bool planar = (i == 0 || 2 * i == n_phi);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const double a = std::abs(g[j][k]);
        if (a > out.full[j][k]) {
          out.full[j][k] = a;
          out.phi[j][k] = phi;
        }
        if (planar) out.planar[j][k] = std::max(out.planar[j][k], a);
      }
  }
  return out;
}

std::vector<double> s_grid(int samples) {
  const int n = std::max(samples, 3);
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = -1.0 + 2.0 * i / (n - 1);
  s.back() = 1.0;
  return s;
}

// Golden refinement around the best dense sample.
template <typename F>
std::pair<double, double> refine(F&& f, const std::vector<double>& s, std::size_t best,
                                 double best_value, double tol) {
  const double lo = s[best == 0 ? 0 : best - 1];
  const double hi = s[std::min(best + 1, s.size() - 1)];
  auto [x, v] = golden_maximize(f, lo, hi, tol);
  if (v > best_value) return {x, v};
  return {s[best], best_value};
}

}  // namespace

SupResult sup_directional(const LandauParams& params, BoundComponent component,
                          const SupOptions& options) {
  const auto s = s_grid(options.samples);
  SupResult out;
  if (component.kind != BoundKind::velocity_gradient) {
    auto f = [&](double x) { return pressure_bound(params.c(), component.kind, x); };
    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double v = f(s[i]);
      if (v > best_value) {
        best_value = v;
        best = i;
      }
    }
    auto [x, v] = refine(f, s, best, best_value, options.tolerance);
    out.value = out.planar_value = v;
    out.s_at_max = x;
    return out;
  }

  const int j = component.j;
  const int k = component.k;
  if (j < 0 || j > 2 || k < 0 || k > 2) throw std::invalid_argument("gradient component out of range");
  const int n_phi = azimuth_count(options);
  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto m = azimuth_max(params, s[i], n_phi);
    if (m.full[j][k] > best_value) {
      best_value = m.full[j][k];
      best = i;
    }
    out.planar_value = std::max(out.planar_value, m.planar[j][k]);
  }
  auto f = [&](double x) { return azimuth_max(params, x, n_phi).full[j][k]; };
  auto [x, v] = refine(f, s, best, best_value, options.tolerance);
  out.value = v;
  out.s_at_max = x;
  out.phi_at_max = azimuth_max(params, x, n_phi).phi[j][k];
  return out;
}

ConstantTable build_constant_table(const LandauParams& params, const SupOptions& options) {
  ConstantTable t;
  t.c = params.c();
  t.k_p = sup_directional(params, {BoundKind::pressure}, options).value;
  t.k_axial = sup_directional(params, {BoundKind::pressure_gradient_axial}, options).value;
  t.k_transverse = sup_directional(params, {BoundKind::pressure_gradient_transverse}, options).value;

  // one shared dense scan for all nine entries, then per-entry refinement
  const auto s = s_grid(options.samples);
  const int n_phi = azimuth_count(options);
  std::array<std::array<std::size_t, 3>, 3> best{};
  Mat3 best_value{};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto m = azimuth_max(params, s[i], n_phi);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        if (m.full[j][k] > best_value[j][k]) {
          best_value[j][k] = m.full[j][k];
          best[j][k] = i;
        }
        t.planar_jk[j][k] = std::max(t.planar_jk[j][k], m.planar[j][k]);
      }
  }
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      auto f = [&](double x) { return azimuth_max(params, x, n_phi).full[j][k]; };
      t.K_jk[j][k] = refine(f, s, best[j][k], best_value[j][k], options.tolerance).second;
      t.K_tilde = std::max(t.K_tilde, t.K_jk[j][k]);
    }
  t.K = 12.0 * t.K_tilde;
  return t;
}

double coupling_constant(const LandauParams& params, const SupOptions& options) {
  return build_constant_table(params, options).K;
}

double find_c0(double tolerance) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("find_c0: tolerance must be positive");
  const double c_max = 1e6;
  auto K = [](double c) { return coupling_constant(LandauParams(c)); };
  if (K(c_max) >= 1.0)
    throw BracketError("K(1e6) >= 1: no threshold c0 in (1, 1e6)");

  // bisection in u = log(c - 1)
  double lo = std::log(1e-6);
  double hi = std::log(c_max - 1.0);
  if (K(1.0 + std::exp(lo)) <= 1.0) throw BracketError("K(c) <= 1 already at the left end");
  double c0 = 0.0;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double c = 1.0 + std::exp(mid);
    const double k = K(c);
    c0 = c;
    if (std::abs(k - 1.0) <= 0.25 * tolerance) break;
    if (k > 1.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15) break;
  }

  // K(c) < 1 above the root
  for (int i = 1; i <= 30; ++i) {
    const double c = c0 * std::pow(c_max / c0, i / 30.0) * (1.0 + 1e-6);
    if (K(std::min(c, c_max)) >= 1.0)
      throw BracketError(fmt::format("K({}) >= 1 above the located threshold {}", c, c0));
  }
  return c0;
}

double threshold_c0() {
  static std::once_flag once;
  static double value = 0.0;
  std::call_once(once, [] { value = find_c0(1e-8); });
  return value;
}

void write_sweep_header(std::ostream& out) {
  out << "c,k_p,K_11,K_12,K_13,K_21,K_22,K_23,K_31,K_32,K_33,K_tilde,K,flag\n";
}

void write_sweep_row(std::ostream& out, const ConstantTable& t, const std::string& flag) {
  fmt::print(out, "{:.12g},{:.12g}", t.c, t.k_p);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) fmt::print(out, ",{:.12g}", t.K_jk[j][k]);
  fmt::print(out, ",{:.12g},{:.12g},{}\n", t.K_tilde, t.K, flag);
}

// --- fields ----------------------------------------------------------------

SampledVectorField gaussian_field(Vec3 center, double sigma, Vec3 amplitude) {
  SampledVectorField w;
  w.name = fmt::format("gaussian(x0=({},{},{}),sigma={})", center[0], center[1], center[2], sigma);
  const double s2 = sigma * sigma;
  w.value = [=](const Vec3& x) {
    const Vec3 d = x - center;
    return std::exp(-dot(d, d) / s2) * amplitude;
  };
  w.gradient = [=](const Vec3& x) {
    const Vec3 d = x - center;
    const double g = std::exp(-dot(d, d) / s2);
    Mat3 m{};
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) m[j][k] = -2.0 * d[j] / s2 * g * amplitude[k];
    return m;
  };
  w.center = center;
  w.extent = 7.0 * sigma;
  w.decay = DecayClass::gaussian;
  return w;
}

SampledVectorField radial_gaussian_field(double sigma) {
  auto w = gaussian_field({0.0, 0.0, 0.0}, sigma, {1.0, 1.0, 1.0});
  w.name = fmt::format("radial_gaussian(sigma={})", sigma);
  return w;
}

SampledVectorField bump_field(Vec3 center, double support_radius, Vec3 amplitude) {
  SampledVectorField w;
  w.name = fmt::format("bump(x0=({},{},{}),R={})", center[0], center[1], center[2], support_radius);
  const TestFunction phi(center, support_radius);
  w.value = [=](const Vec3& x) { return phi.value(x) * amplitude; };
  w.gradient = [=](const Vec3& x) {
    const Vec3 g = phi.gradient(x);
    Mat3 m{};
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) m[j][k] = g[j] * amplitude[k];
    return m;
  };
  w.center = center;
  w.extent = support_radius;
  w.decay = DecayClass::compact;
  return w;
}

namespace {
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
}  // namespace

SampledVectorField swirl_field(Vec3 center, double sigma, Vec3 axis) {
  SampledVectorField w;
  w.name = fmt::format("swirl(x0=({},{},{}),sigma={})", center[0], center[1], center[2], sigma);
  const double s2 = sigma * sigma;
  w.value = [=](const Vec3& x) {
    const Vec3 d = x - center;
    return std::exp(-dot(d, d) / s2) * cross(axis, d);
  };
  w.gradient = [=](const Vec3& x) {
    const Vec3 d = x - center;
    const double g = std::exp(-dot(d, d) / s2);
    const Vec3 ad = cross(axis, d);
    Mat3 m{};
    for (int j = 0; j < 3; ++j) {
      Vec3 e{0.0, 0.0, 0.0};
      e[j] = 1.0;
      const Vec3 ae = cross(axis, e);
      for (int k = 0; k < 3; ++k) m[j][k] = g * (ae[k] - 2.0 * d[j] / s2 * ad[k]);
    }
    return m;
  };
  w.center = center;
  w.extent = 7.0 * sigma;
  w.decay = DecayClass::gaussian;
  return w;
}

SampledVectorField dipole_field(Vec3 center, double sigma, Vec3 direction, Vec3 amplitude) {
  SampledVectorField w;
  w.name = fmt::format("dipole(x0=({},{},{}),sigma={})", center[0], center[1], center[2], sigma);
  const double s2 = sigma * sigma;
  w.value = [=](const Vec3& x) {
    const Vec3 d = x - center;
    return dot(d, direction) * std::exp(-dot(d, d) / s2) * amplitude;
  };
  w.gradient = [=](const Vec3& x) {
    const Vec3 d = x - center;
    const double g = std::exp(-dot(d, d) / s2);
    const double proj = dot(d, direction);
    Mat3 m{};
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        m[j][k] = g * (direction[j] - 2.0 * d[j] / s2 * proj) * amplitude[k];
    return m;
  };
  w.center = center;
  w.extent = 7.5 * sigma;
  w.decay = DecayClass::gaussian;
  return w;
}

std::vector<SampledVectorField> standard_field_suite() {
  std::vector<SampledVectorField> suite;
  suite.push_back(radial_gaussian_field(1.0));
  suite.push_back(radial_gaussian_field(0.4));
  suite.push_back(gaussian_field({0.0, 0.0, 0.0}, 1.0, {1.0, 0.0, 0.0}));
  suite.push_back(gaussian_field({0.0, 0.0, 0.0}, 0.5, {0.0, 1.0, 0.0}));
  suite.push_back(gaussian_field({0.5, 0.0, 0.0}, 0.7, {1.0, 0.0, 0.0}));
  suite.push_back(gaussian_field({-0.5, 0.3, 0.0}, 0.6, {1.0, 1.0, 0.0}));
  suite.push_back(gaussian_field({0.0, 0.8, -0.4}, 1.2, {0.3, -0.5, 1.0}));
  suite.push_back(gaussian_field({1.5, 0.0, 0.0}, 0.8, {0.0, 0.0, 1.0}));
  suite.push_back(bump_field({0.0, 0.0, 0.0}, 1.0, {1.0, 0.0, 0.0}));
  suite.push_back(bump_field({3.0, 0.0, 0.0}, 1.0, {1.0, 1.0, 1.0}));
  suite.push_back(bump_field({0.3, -0.2, 0.1}, 1.5, {1.0, -1.0, 0.5}));
  suite.push_back(bump_field({-1.0, 0.5, 0.0}, 2.0, {0.0, 1.0, 0.0}));
  suite.push_back(swirl_field({0.0, 0.0, 0.0}, 1.0, {1.0, 0.0, 0.0}));
  suite.push_back(swirl_field({0.0, 0.0, 0.0}, 0.6, {0.0, 0.0, 1.0}));
  suite.push_back(swirl_field({0.4, 0.2, 0.0}, 0.9, {0.0, 1.0, 1.0}));
  suite.push_back(swirl_field({-0.8, 0.0, 0.5}, 1.1, {1.0, 0.0, 1.0}));
  suite.push_back(dipole_field({0.0, 0.0, 0.0}, 1.0, {1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}));
  suite.push_back(dipole_field({0.0, 0.0, 0.0}, 0.8, {0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}));
  suite.push_back(dipole_field({0.2, 0.1, -0.3}, 0.7, {0.0, 0.0, 1.0}, {0.0, 1.0, 1.0}));
  suite.push_back(dipole_field({1.0, 0.0, 0.0}, 1.3, {1.0, 1.0, 0.0}, {1.0, -1.0, 0.0}));
  return suite;
}

FieldIntegrals field_integrals(const SampledVectorField& w, const LandauParams* params,
                               const quadrature::AdaptiveOptions& options) {
  auto integrand = [&](const Vec3& x, std::span<double> out) {
    const Vec3 d = x - w.center;
    if (w.decay == DecayClass::compact && norm(d) >= w.extent) {
      out[0] = out[1] = out[2] = 0.0;
      return;
    }
    const Vec3 v = w.value(x);
    const Mat3 g = w.gradient(x);
    const double r2 = dot(x, x);
    out[0] = dot(v, v) / r2;
    double dir = 0.0;
    for (const auto& row : g) dir += dot(row, row);
    out[1] = dir;
    out[2] = 0.0;
    if (params) {
      const Mat3 gv = field::eval_velocity_gradient(*params, x);
      double cross = 0.0;
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) cross += v[j] * v[k] * gv[j][k];
      out[2] = cross;
    }
  };
  const auto res = quadrature::integrate_adaptive(
      integrand, 3, quadrature::enclosing_region(w.center, w.extent), options);
  return {res.values[0], res.values[1], res.values[2]};
}

double hardy_ratio(const SampledVectorField& w, const quadrature::AdaptiveOptions& options) {
  const auto I = field_integrals(w, nullptr, options);
  return I.weighted_l2 / I.dirichlet;
}

double cross_term_ratio(const LandauParams& params, const SampledVectorField& w,
                        const quadrature::AdaptiveOptions& options) {
  const auto I = field_integrals(w, &params, options);
  return std::abs(I.cross) / I.dirichlet;
}

}  // namespace landau::hardy
