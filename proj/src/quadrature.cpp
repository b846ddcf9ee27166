#include "landau/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <fmt/format.h>

namespace landau::quadrature {

namespace {

Rule1D compute_gauss_legendre(std::size_t n) {
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute the derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
      p0 = p1;
      p1 = pk;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const Rule1D& gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
  static std::mutex mutex;
  static std::map<std::size_t, Rule1D> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

Rule1D composite_gauss(double a, double b, std::size_t panels, std::size_t order) {
  const Rule1D& base = gauss_legendre(order);
  Rule1D out;
  out.nodes.reserve(panels * order);
  out.weights.reserve(panels * order);
  const double width = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + width * static_cast<double>(p);
    for (std::size_t i = 0; i < order; ++i) {
      out.nodes.push_back(lo + 0.5 * width * (base.nodes[i] + 1.0));
      out.weights.push_back(0.5 * width * base.weights[i]);
    }
  }
  return out;
}

void integrate_region(const MultiIntegrand& f, std::size_t n_values, const SphericalRegion& region,
                      const SphericalResolution& res, std::span<double> values,
                      std::span<double> magnitudes) {
  const Rule1D radial =
      composite_gauss(region.r_min, region.r_max, res.radial_panels, res.radial_order);
  const Rule1D polar = composite_gauss(region.mu_min, 1.0, 1, res.polar);
  const double dphi = 2.0 * std::numbers::pi / static_cast<double>(res.azimuth);

  // orthonormal frame (axis, e1, e2)
  const Vec3 a = (1.0 / norm(region.axis)) * region.axis;
  const Vec3 helper = std::abs(a[0]) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
  Vec3 e1 = helper - dot(helper, a) * a;
  e1 = (1.0 / norm(e1)) * e1;
  const Vec3 e2{a[1] * e1[2] - a[2] * e1[1], a[2] * e1[0] - a[0] * e1[2],
                a[0] * e1[1] - a[1] * e1[0]};

  std::vector<double> buf(n_values);
  for (std::size_t v = 0; v < n_values; ++v) values[v] = magnitudes[v] = 0.0;

  for (std::size_t ia = 0; ia < res.azimuth; ++ia) {
    const double phi = dphi * static_cast<double>(ia);
    const double cphi = std::cos(phi);
    const double sphi = std::sin(phi);
    for (std::size_t it = 0; it < polar.nodes.size(); ++it) {
      const double mu = polar.nodes[it];
      const double sin_theta = std::sqrt(std::max(0.0, 1.0 - mu * mu));
      const Vec3 dir = mu * a + (sin_theta * cphi) * e1 + (sin_theta * sphi) * e2;
      const double w_ang = polar.weights[it] * dphi;
      for (std::size_t ir = 0; ir < radial.nodes.size(); ++ir) {
        const double r = radial.nodes[ir];
        const double w = w_ang * radial.weights[ir] * r * r;
        f(r * dir, buf);
        for (std::size_t v = 0; v < n_values; ++v) {
          values[v] += w * buf[v];
          magnitudes[v] += w * std::abs(buf[v]);
        }
      }
    }
  }
}

AdaptiveResult integrate_adaptive(const MultiIntegrand& f, std::size_t n_values,
                                  const SphericalRegion& region, const AdaptiveOptions& options) {
  AdaptiveResult prev;
  prev.values.assign(n_values, 0.0);
  prev.magnitudes.assign(n_values, 0.0);
  SphericalResolution res = options.start;
  for (int level = 0; level < options.max_levels; ++level) {
    AdaptiveResult cur;
    cur.values.assign(n_values, 0.0);
    cur.magnitudes.assign(n_values, 0.0);
    integrate_region(f, n_values, region, res, cur.values, cur.magnitudes);
    cur.levels = level + 1;
    if (level > 0) {
      bool converged = true;
      cur.change.resize(n_values);
      for (std::size_t v = 0; v < n_values; ++v) {
        cur.change[v] = std::abs(cur.values[v] - prev.values[v]);
        const double scale = std::max(cur.magnitudes[v], 1e-300);
        if (cur.change[v] > options.rel_tolerance * scale) converged = false;
      }
      if (converged) return cur;
    }
    prev = std::move(cur);
    res = res.refined();
  }
  throw QuadratureError(fmt::format(
      "spherical quadrature did not converge to {:.1e} within {} refinement levels",
      options.rel_tolerance, options.max_levels));
}

SphericalRegion enclosing_region(const Vec3& center, double extent) {
  const double d = norm(center);
  if (d <= extent) return {0.0, d + extent};
  const double ratio = extent / d;
  return {d - extent, d + extent, (1.0 / d) * center, std::sqrt(1.0 - ratio * ratio)};
}

}  // namespace landau::quadrature
