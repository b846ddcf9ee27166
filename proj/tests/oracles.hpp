#pragma once

// Reference computations that share no code with the library.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>

namespace oracle {

using V3 = std::array<double, 3>;

/// Exact rational arithmetic on small integers.
struct Fraction {
  long long num = 0;
  long long den = 1;

  Fraction(long long n = 0, long long d = 1) : num(n), den(d) { normalize(); }
  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend Fraction operator+(Fraction a, Fraction b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend Fraction operator-(Fraction a, Fraction b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
  friend Fraction operator*(Fraction a, Fraction b) { return {a.num * b.num, a.den * b.den}; }
  friend Fraction operator/(Fraction a, Fraction b) { return {a.num * b.den, a.den * b.num}; }
};

/// Landau velocity at a point with rational coordinates and rational |x|.
inline std::array<Fraction, 3> landau_velocity_exact(Fraction c, std::array<Fraction, 3> x, Fraction r) {
  const Fraction two(2);
  const Fraction den = c * r - x[0];
  const Fraction scale = two / (r * den * den);
  const Fraction t = c * x[0] - r;
  return {scale * (c * r * r - two * x[0] * r + c * x[0] * x[0]), scale * x[1] * t, scale * x[2] * t};
}

/// Central differences of f along each axis with two Richardson levels;
/// result[j][k] = d_j f^k.
inline std::array<V3, 3> fd_jacobian(const std::function<V3(const V3&)>& f, const V3& x, double h) {
  std::array<V3, 3> out{};
  for (int j = 0; j < 3; ++j) {
    auto diff = [&](double step) {
      V3 xp = x, xm = x;
      xp[j] += step;
      xm[j] -= step;
      const V3 a = f(xp), b = f(xm);
      return V3{(a[0] - b[0]) / (2 * step), (a[1] - b[1]) / (2 * step), (a[2] - b[2]) / (2 * step)};
    };
    const V3 d1 = diff(h), d2 = diff(h / 2), d4 = diff(h / 4);
    for (int k = 0; k < 3; ++k) {
      const double r1 = (4 * d2[k] - d1[k]) / 3;
      const double r2 = (4 * d4[k] - d2[k]) / 3;
      out[j][k] = (16 * r2 - r1) / 15;
    }
  }
  return out;
}

/// Composite Simpson rule on [a, b] with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

struct MonteCarlo {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Integral of f over the ball |x - center| < R by uniform sampling.
inline MonteCarlo ball_monte_carlo(const std::function<double(const V3&)>& f, V3 center, double R,
                                   long samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double volume = 4.0 / 3.0 * M_PI * R * R * R;
  double sum = 0.0, sum2 = 0.0;
  long n = 0;
  while (n < samples) {
    const V3 d{u(rng), u(rng), u(rng)};
    if (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] >= 1.0) continue;
    const double v = f({center[0] + R * d[0], center[1] + R * d[1], center[2] + R * d[2]});
    sum += v;
    sum2 += v * v;
    ++n;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  return {volume * mean, volume * std::sqrt(var / n)};
}

}  // namespace oracle
