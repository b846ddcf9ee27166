#include "landau/spectral_core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <omp.h>

#include "landau/parallel.hpp"

namespace landau::spectral {

static_assert(std::endian::native == std::endian::little, "snapshot IO assumes a little-endian host");

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Reusable c2r scratch buffers; c2r transforms overwrite their input.
struct ScratchPool {
  std::mutex mutex;
  std::vector<std::unique_ptr<ComplexArray>> free;
};

ScratchPool& scratch_pool(int n) {
  static std::mutex registry_mutex;
  static std::vector<std::pair<int, std::unique_ptr<ScratchPool>>> registry;
  std::lock_guard lock(registry_mutex);
  for (auto& [size, pool] : registry)
    if (size == n) return *pool;
  registry.emplace_back(n, std::make_unique<ScratchPool>());
  return *registry.back().second;
}

double smoothstep(double s) { return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s); }
double smoothstep_derivative(double s) { return 30.0 * s * s * (1.0 - s) * (1.0 - s); }
double smoothstep_second(double s) { return 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s); }

}  // namespace

double GridSpec::k_unit() const { return std::numbers::pi / L_box; }

GridSpec make_grid(int N, double L_box, double R_cut, double eps_core) {
  if (N < 16 || !std::has_single_bit(static_cast<unsigned>(N)))
    throw std::invalid_argument(fmt::format("grid size N = {} must be a power of two >= 16", N));
  if (!(L_box > 0.0) || !std::isfinite(L_box))
    throw std::invalid_argument(fmt::format("box half-width L = {} must be positive", L_box));
  if (!(eps_core > 0.0 && eps_core < R_cut && R_cut < L_box))
    throw std::invalid_argument(fmt::format(
        "need 0 < eps_core < R_cut < L_box, got eps_core = {}, R_cut = {}, L_box = {}", eps_core,
        R_cut, L_box));
  GridSpec g;
  g.N = N;
  g.L_box = L_box;
  g.R_cut = R_cut;
  g.eps_core = eps_core;
  g.offset = 0.5 * g.h();
  return g;
}

RealField3::RealField3(int n) : N(n) {
  for (auto& c : comp) c.assign(std::size_t(n) * n * n, 0.0);
}

SpectralField3::SpectralField3(int n) : N(n) {
  for (auto& c : comp) c.assign(std::size_t(n) * n * (n / 2 + 1), Complex{});
}

void SpectralField3::set_zero() {
  for (auto& c : comp) std::fill(c.begin(), c.end(), Complex{});
}

// --- SpectralSpace ---------------------------------------------------------

SpectralSpace::SpectralSpace(const GridSpec& grid) : grid_(grid) {
  const int n = grid_.N;
  RealArray real(grid_.real_size());
  ComplexArray cplx(grid_.complex_size());
  std::lock_guard lock(planner_mutex());
  r2c_ = fftw_plan_dft_r2c_3d(n, n, n, real.data(), reinterpret_cast<fftw_complex*>(cplx.data()),
                              FFTW_ESTIMATE);
  c2r_ = fftw_plan_dft_c2r_3d(n, n, n, reinterpret_cast<fftw_complex*>(cplx.data()), real.data(),
                              FFTW_ESTIMATE);
  if (!r2c_ || !c2r_) throw std::runtime_error("FFTW plan creation failed");
  const double u = grid_.k_unit();
  for (int i = 0; i < nh(); ++i) kx_.push_back(2 * i == n ? 0.0 : u * i);
  for (int i = 0; i < n; ++i) ky_.push_back(2 * i == n ? 0.0 : u * wavenumber(i));
}

SpectralSpace::~SpectralSpace() {
  std::lock_guard lock(planner_mutex());
  if (r2c_) fftw_destroy_plan(r2c_);
  if (c2r_) fftw_destroy_plan(c2r_);
}

bool SpectralSpace::is_nyquist(int ikx, int iky, int ikz) const {
  const int half = grid_.N / 2;
  return ikx == half || iky == half || ikz == half;
}

bool SpectralSpace::retained(int ikx, int iky, int ikz) const {
  const int K = grid_.dealias_max();
  return ikx <= K && std::abs(wavenumber(iky)) <= K && std::abs(wavenumber(ikz)) <= K;
}

void SpectralSpace::forward(const RealArray& in, ComplexArray& out) const {
  out.resize(grid_.complex_size());
  fftw_execute_dft_r2c(r2c_, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / static_cast<double>(grid_.real_size());
  for (auto& v : out) v *= scale;
}

void SpectralSpace::inverse(const ComplexArray& in, RealArray& out) const {
  auto& pool = scratch_pool(grid_.N);
  std::unique_ptr<ComplexArray> scratch;
  {
    std::lock_guard lock(pool.mutex);
    if (!pool.free.empty()) {
      scratch = std::move(pool.free.back());
      pool.free.pop_back();
    }
  }
  if (!scratch) scratch = std::make_unique<ComplexArray>(grid_.complex_size());
  std::copy(in.begin(), in.end(), scratch->begin());
  out.resize(grid_.real_size());
  fftw_execute_dft_c2r(c2r_, reinterpret_cast<fftw_complex*>(scratch->data()), out.data());
  std::lock_guard lock(pool.mutex);
  pool.free.push_back(std::move(scratch));
}

// --- transforms and projections -------------------------------------------

SpectralField3 transform_forward(const SpectralSpace& space, const RealField3& f) {
  SpectralField3 out(space.N());
#pragma omp parallel for schedule(static)
  for (int c = 0; c < 3; ++c) space.forward(f.comp[c], out.comp[c]);
  return out;
}

RealField3 transform_inverse(const SpectralSpace& space, const SpectralField3& f) {
  RealField3 out(space.N());
#pragma omp parallel for schedule(static)
  for (int c = 0; c < 3; ++c) space.inverse(f.comp[c], out.comp[c]);
  return out;
}

void leray_project_inplace(const SpectralSpace& space, SpectralField3& f) {
  const int n = space.N(), nh = space.nh();
#pragma omp parallel for schedule(static)
  for (int ikz = 0; ikz < n; ++ikz) {
    for (int iky = 0; iky < n; ++iky) {
      for (int ikx = 0; ikx < nh; ++ikx) {
        const std::size_t i = space.cindex(ikx, iky, ikz);
        if ((ikx == 0 && iky == 0 && ikz == 0) || space.is_nyquist(ikx, iky, ikz)) {
          for (auto& c : f.comp) c[i] = Complex{};
          continue;
        }
        const Vec3 k = space.wavevector(ikx, iky, ikz);
        const double k2 = dot(k, k);
        // The second pass removes the roundoff left by the first, which
        // matters for modes that project to (nearly) zero.
        for (int pass = 0; pass < 2; ++pass) {
          const Complex kf = k[0] * f.comp[0][i] + k[1] * f.comp[1][i] + k[2] * f.comp[2][i];
          for (int c = 0; c < 3; ++c) f.comp[c][i] -= (k[c] / k2) * kf;
        }
      }
    }
  }
  f.divergence_free = true;
  f.zero_mean = true;
}

SpectralField3 leray_project(const SpectralSpace& space, const SpectralField3& f) {
  SpectralField3 out = f;
  leray_project_inplace(space, out);
  return out;
}

void dealias(const SpectralSpace& space, SpectralField3& f) {
  const int n = space.N(), nh = space.nh();
#pragma omp parallel for schedule(static)
  for (int ikz = 0; ikz < n; ++ikz)
    for (int iky = 0; iky < n; ++iky)
      for (int ikx = 0; ikx < nh; ++ikx)
        if (!space.retained(ikx, iky, ikz)) {
          const std::size_t i = space.cindex(ikx, iky, ikz);
          for (auto& c : f.comp) c[i] = Complex{};
        }
}

bool is_dealiased(const SpectralSpace& space, const SpectralField3& f) {
  const int n = space.N(), nh = space.nh();
  for (int ikz = 0; ikz < n; ++ikz)
    for (int iky = 0; iky < n; ++iky)
      for (int ikx = 0; ikx < nh; ++ikx)
        if (!space.retained(ikx, iky, ikz)) {
          const std::size_t i = space.cindex(ikx, iky, ikz);
          for (const auto& c : f.comp)
            if (c[i] != Complex{}) return false;
        }
  return true;
}

namespace {

// Sum over the half spectrum of weight(ikx) * term(i, k), slab by slab in a
// fixed order.
template <typename Term>
double spectral_sum(const SpectralSpace& space, Term&& term) {
  const int n = space.N(), nh = space.nh();
  return ordered_sum(n, [&](int ikz) {
    double slab = 0.0;
    for (int iky = 0; iky < n; ++iky)
      for (int ikx = 0; ikx < nh; ++ikx)
        slab += space.mode_weight(ikx) *
                term(space.cindex(ikx, iky, ikz), ikx, iky, ikz);
    return slab;
  });
}

}  // namespace

double inner_product(const SpectralSpace& space, const SpectralField3& a, const SpectralField3& b) {
  const double s = spectral_sum(space, [&](std::size_t i, int, int, int) {
    double acc = 0.0;
    for (int c = 0; c < 3; ++c) acc += (a.comp[c][i] * std::conj(b.comp[c][i])).real();
    return acc;
  });
  return space.grid().volume() * s;
}

double gradient_inner_product(const SpectralSpace& space, const SpectralField3& a,
                              const SpectralField3& b) {
  const double s = spectral_sum(space, [&](std::size_t i, int ikx, int iky, int ikz) {
    const Vec3 k = space.wavevector(ikx, iky, ikz);
    double acc = 0.0;
    for (int c = 0; c < 3; ++c) acc += (a.comp[c][i] * std::conj(b.comp[c][i])).real();
    return dot(k, k) * acc;
  });
  return space.grid().volume() * s;
}

double l2_norm(const SpectralSpace& space, const SpectralField3& f) {
  return std::sqrt(std::max(0.0, inner_product(space, f, f)));
}

double h1_seminorm(const SpectralSpace& space, const SpectralField3& f) {
  return std::sqrt(std::max(0.0, gradient_inner_product(space, f, f)));
}

double grid_l2_norm(const SpectralSpace& space, const RealField3& f) {
  const int n = space.N();
  const std::size_t slab = std::size_t(n) * n;
  const double s = ordered_sum(n, [&](int iz) {
    double acc = 0.0;
    for (std::size_t i = iz * slab; i < (iz + 1) * slab; ++i)
      for (const auto& c : f.comp) acc += c[i] * c[i];
    return acc;
  });
  const double h = space.grid().h();
  return std::sqrt(h * h * h * s);
}

double max_relative_divergence(const SpectralSpace& space, const SpectralField3& f) {
  const int n = space.N(), nh = space.nh();
  double worst = 0.0;
  for (int ikz = 0; ikz < n; ++ikz)
    for (int iky = 0; iky < n; ++iky)
      for (int ikx = 0; ikx < nh; ++ikx) {
        const std::size_t i = space.cindex(ikx, iky, ikz);
        const double mag = std::sqrt(std::norm(f.comp[0][i]) + std::norm(f.comp[1][i]) +
                                     std::norm(f.comp[2][i]));
        if (mag == 0.0) continue;
        const Vec3 k = space.wavevector(ikx, iky, ikz);
        const double kn = norm(k);
        if (kn == 0.0) continue;
        const Complex kf = k[0] * f.comp[0][i] + k[1] * f.comp[1][i] + k[2] * f.comp[2][i];
        worst = std::max(worst, std::abs(kf) / (kn * mag));
      }
  return worst;
}

GradientSamples physical_gradient(const SpectralSpace& space, const SpectralField3& f) {
  GradientSamples out;
  const int n = space.N(), nh = space.nh();
#pragma omp parallel for schedule(static)
  for (int entry = 0; entry < 9; ++entry) {
    const int j = entry / 3, c = entry % 3;
    ComplexArray d(space.grid().complex_size());
    const auto& kx = space.kx();
    const auto& ky = space.ky();
    const Complex* src = f.comp[c].data();
    std::size_t i = 0;
    for (int ikz = 0; ikz < n; ++ikz)
      for (int iky = 0; iky < n; ++iky)
        for (int ikx = 0; ikx < nh; ++ikx, ++i) {
          const double kj = j == 0 ? kx[ikx] : (j == 1 ? ky[iky] : ky[ikz]);
          d[i] = Complex(-kj * src[i].imag(), kj * src[i].real());
        }
    space.inverse(d, out[entry]);
  }
  return out;
}

RealField3 physical_curl(const SpectralSpace& space, const SpectralField3& f) {
  RealField3 out(space.N());
  const int n = space.N(), nh = space.nh();
#pragma omp parallel for schedule(static)
  for (int c = 0; c < 3; ++c) {
    // (curl f)_c = d_a f^b - d_b f^a with (c, a, b) cyclic
    const int a = (c + 1) % 3, b = (c + 2) % 3;
    ComplexArray d(space.grid().complex_size());
    std::size_t i = 0;
    for (int ikz = 0; ikz < n; ++ikz)
      for (int iky = 0; iky < n; ++iky)
        for (int ikx = 0; ikx < nh; ++ikx, ++i) {
          const double k[3] = {space.kx()[ikx], space.ky()[iky], space.ky()[ikz]};
          const Complex s = k[a] * f.comp[b][i] - k[b] * f.comp[a][i];
          d[i] = Complex(-s.imag(), s.real());
        }
    space.inverse(d, out.comp[c]);
  }
  return out;
}

SpectralField3 negative_laplacian(const SpectralSpace& space, const SpectralField3& f) {
  SpectralField3 out = f;
  const int n = space.N(), nh = space.nh();
#pragma omp parallel for schedule(static)
  for (int ikz = 0; ikz < n; ++ikz)
    for (int iky = 0; iky < n; ++iky)
      for (int ikx = 0; ikx < nh; ++ikx) {
        const std::size_t i = space.cindex(ikx, iky, ikz);
        const Vec3 k = space.wavevector(ikx, iky, ikz);
        const double k2 = dot(k, k);
        for (auto& c : out.comp) c[i] *= k2;
      }
  return out;
}

// --- background ------------------------------------------------------------

double cutoff(const GridSpec& grid, double r) {
  if (r <= grid.R_cut) return 1.0;
  const double end = grid.background_end();
  if (r >= end) return 0.0;
  return 1.0 - smoothstep((r - grid.R_cut) / (end - grid.R_cut));
}

double cutoff_derivative(const GridSpec& grid, double r) {
  const double end = grid.background_end();
  if (r <= grid.R_cut || r >= end) return 0.0;
  return -smoothstep_derivative((r - grid.R_cut) / (end - grid.R_cut)) / (end - grid.R_cut);
}

double cutoff_second_derivative(const GridSpec& grid, double r) {
  const double end = grid.background_end();
  if (r <= grid.R_cut || r >= end) return 0.0;
  const double w = end - grid.R_cut;
  return -smoothstep_second((r - grid.R_cut) / w) / (w * w);
}

namespace {

// Capped field and its gradient at x (before the cutoff).
void capped_field(const LandauParams& params, const GridSpec& grid, const Vec3& x, double r,
                  Vec3& v, Mat3& g, bool& capped) {
  capped = r < grid.eps_core;
  if (!capped) {
    v = field::eval_velocity(params, x);
    g = field::eval_velocity_gradient(params, x);
    return;
  }
  // v(x) = v_c(eps x / |x|): homogeneous of degree 0.
  const double eps = grid.eps_core;
  const Vec3 xhat = (1.0 / r) * x;
  const Vec3 y = eps * xhat;
  v = field::eval_velocity(params, y);
  const Mat3 gy = field::eval_velocity_gradient(params, y);
  for (int k = 0; k < 3; ++k) {
    double radial = 0.0;
    for (int m = 0; m < 3; ++m) radial += xhat[m] * gy[m][k];
    for (int j = 0; j < 3; ++j) g[j][k] = (eps / r) * (gy[j][k] - xhat[j] * radial);
  }
}

}  // namespace

BackgroundField zero_background(const SpectralSpace& space) {
  const int n = space.N();
  BackgroundField bg;
  bg.samples = RealField3(n);
  bg.velocity = RealField3(n);
  bg.compensating_force = RealField3(n);
  bg.vorticity = RealField3(n);
  bg.spectral = SpectralField3(n);
  bg.spectral.divergence_free = bg.spectral.zero_mean = true;
  for (auto& g : bg.gradient_samples) g.assign(space.grid().real_size(), 0.0);
  for (auto& g : bg.velocity_gradient) g.assign(space.grid().real_size(), 0.0);
  return bg;
}

BackgroundField build_background(const LandauParams& params, const SpectralSpace& space) {
  const GridSpec& grid = space.grid();
  const int n = grid.N;
  BackgroundField bg = zero_background(space);
  bg.active = true;
  bg.c = params.c();

  std::vector<double> slab_div(n, 0.0);
  std::vector<long> slab_caps(n, 0);
#pragma omp parallel for schedule(static)
  for (int iz = 0; iz < n; ++iz) {
    for (int iy = 0; iy < n; ++iy) {
      for (int ix = 0; ix < n; ++ix) {
        const Vec3 x{grid.node(ix), grid.node(iy), grid.node(iz)};
        const double r = norm(x);
        const double chi = cutoff(grid, r);
        if (chi == 0.0) continue;
        Vec3 v;
        Mat3 g;
        bool capped;
        capped_field(params, grid, x, r, v, g, capped);
        if (capped) ++slab_caps[iz];
        const double dchi = cutoff_derivative(grid, r);
        Vec3 val = chi * v;
        Mat3 grad;
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k) grad[j][k] = chi * g[j][k] + dchi * (x[j] / r) * v[k];
        if (dchi != 0.0) {
          // grad chi x A = (chi'/r) x x A
          const Vec3 A = field::eval_vector_potential(params, x);
          const Mat3 dA = field::eval_vector_potential_gradient(params, x);
          const double gfac = dchi / r;
          const double dg = (cutoff_second_derivative(grid, r) * r - dchi) / (r * r);
          const Vec3 xa = cross(x, A);
          val = val + gfac * xa;
          for (int j = 0; j < 3; ++j) {
            Vec3 ej{};
            ej[j] = 1.0;
            const Vec3 d = cross(ej, A) + cross(x, dA[j]);
            for (int k = 0; k < 3; ++k) grad[j][k] += dg * (x[j] / r) * xa[k] + gfac * d[k];
          }
        }
        const std::size_t i = bg.samples.index(ix, iy, iz);
        double trace = 0.0;
        for (int k = 0; k < 3; ++k) {
          bg.samples.comp[k][i] = val[k];
          for (int j = 0; j < 3; ++j) bg.gradient_samples[3 * j + k][i] = grad[j][k];
          trace += grad[k][k];
        }
        slab_div[iz] = std::max(slab_div[iz], std::abs(trace));
      }
    }
  }
  for (int iz = 0; iz < n; ++iz) {
    bg.max_pointwise_divergence = std::max(bg.max_pointwise_divergence, slab_div[iz]);
    bg.cap_count += slab_caps[iz];
  }

  bg.spectral = transform_forward(space, bg.samples);
  leray_project_inplace(space, bg.spectral);
  dealias(space, bg.spectral);
  bg.velocity = transform_inverse(space, bg.spectral);
  bg.velocity_gradient = physical_gradient(space, bg.spectral);
  bg.vorticity = physical_curl(space, bg.spectral);

  // (V . grad) V on the grid, then F = -Delta V + P D[(V . grad) V].
  RealField3 adv(n);
  const std::size_t total = grid.real_size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < total; ++i)
    for (int k = 0; k < 3; ++k) {
      double s = 0.0;
      for (int j = 0; j < 3; ++j) s += bg.velocity.comp[j][i] * bg.velocity_gradient[3 * j + k][i];
      adv.comp[k][i] = s;
    }
  SpectralField3 force = transform_forward(space, adv);
  dealias(space, force);
  leray_project_inplace(space, force);
  const SpectralField3 visc = negative_laplacian(space, bg.spectral);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < force.comp[c].size(); ++i) force.comp[c][i] += visc.comp[c][i];
  bg.compensating_force = transform_inverse(space, force);

  double speed = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    const double s2 = bg.velocity.comp[0][i] * bg.velocity.comp[0][i] +
                      bg.velocity.comp[1][i] * bg.velocity.comp[1][i] +
                      bg.velocity.comp[2][i] * bg.velocity.comp[2][i];
    speed = std::max(speed, s2);
  }
  bg.max_speed = std::sqrt(speed);

  RealField3 diff(n);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < total; ++i)
      diff.comp[c][i] = bg.samples.comp[c][i] - bg.velocity.comp[c][i];
  const double ref = grid_l2_norm(space, bg.samples);
  bg.projection_defect = ref > 0.0 ? grid_l2_norm(space, diff) / ref : 0.0;
  return bg;
}

double fd_divergence_max(const LandauParams& params, const GridSpec& grid) {
  const int n = grid.N;
  const double h = grid.h();
  std::vector<double> slab(n, 0.0);
#pragma omp parallel for schedule(static)
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const Vec3 x{grid.node(ix), grid.node(iy), grid.node(iz)};
        const double r = norm(x);
        if (r < 2.0 * grid.eps_core || r + h >= grid.R_cut) continue;
        double div = 0.0;
        for (int j = 0; j < 3; ++j) {
          Vec3 xp = x, xm = x;
          xp[j] += h;
          xm[j] -= h;
          div += (field::eval_velocity(params, xp)[j] - field::eval_velocity(params, xm)[j]) /
                 (2.0 * h);
        }
        slab[iz] = std::max(slab[iz], std::abs(div));
      }
  return *std::max_element(slab.begin(), slab.end());
}

// --- norms -----------------------------------------------------------------

double grid_lp_norm(const SpectralSpace& space, const RealField3& f, double p) {
  const int n = space.N();
  const std::size_t slab = std::size_t(n) * n;
  const double s = ordered_sum(n, [&](int iz) {
    double acc = 0.0;
    for (std::size_t i = iz * slab; i < (iz + 1) * slab; ++i) {
      const double m2 = f.comp[0][i] * f.comp[0][i] + f.comp[1][i] * f.comp[1][i] +
                        f.comp[2][i] * f.comp[2][i];
      acc += p == 4.0 ? m2 * m2 : std::pow(m2, 0.5 * p);
    }
    return acc;
  });
  const double h = space.grid().h();
  return std::pow(h * h * h * s, 1.0 / p);
}

double grid_cross_term(const SpectralSpace& space, const RealField3& f,
                       const GradientSamples& gradient) {
  const int n = space.N();
  const std::size_t slab = std::size_t(n) * n;
  const double s = ordered_sum(n, [&](int iz) {
    double acc = 0.0;
    for (std::size_t i = iz * slab; i < (iz + 1) * slab; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) acc += f.comp[j][i] * f.comp[k][i] * gradient[3 * j + k][i];
    return acc;
  });
  const double h = space.grid().h();
  return h * h * h * s;
}

NormRecord norms(const SpectralSpace& space, const SpectralField3& f,
                 const BackgroundField* background, double p) {
  NormRecord rec;
  rec.p = p;
  rec.l2 = l2_norm(space, f);
  rec.h1 = h1_seminorm(space, f);
  const RealField3 phys = transform_inverse(space, f);
  rec.l4 = grid_lp_norm(space, phys, 4.0);
  rec.lp = p == 4.0 ? rec.l4 : grid_lp_norm(space, phys, p);
  if (background && background->active)
    rec.cross = grid_cross_term(space, phys, background->velocity_gradient);
  return rec;
}

void write_norm_header(std::ostream& out) { out << "t,l2,h1,l4,lp,p,cross\n"; }

void write_norm_row(std::ostream& out, double t, const NormRecord& r) {
  out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", t, r.l2, r.h1,
                     r.l4, r.lp, r.p, r.cross);
}

// --- snapshots -------------------------------------------------------------

void write_snapshot(const std::filesystem::path& path, const SnapshotHeader& header,
                    const RealField3& f) {
  if (header.N != static_cast<std::uint64_t>(f.N))
    throw std::invalid_argument("snapshot header N does not match the field");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write snapshot {}", path.string()));
  char buf[32];
  std::memcpy(buf, kSnapshotMagic, 4);
  std::memcpy(buf + 4, &header.version, 4);
  std::memcpy(buf + 8, &header.N, 8);
  std::memcpy(buf + 16, &header.L_box, 8);
  std::memcpy(buf + 24, &header.c, 8);
  out.write(buf, sizeof buf);
  for (const auto& c : f.comp)
    out.write(reinterpret_cast<const char*>(c.data()),
              static_cast<std::streamsize>(c.size() * sizeof(double)));
  if (!out) throw std::runtime_error(fmt::format("write failed for snapshot {}", path.string()));
}

std::pair<SnapshotHeader, RealField3> read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open snapshot {}", path.string()));
  char buf[32];
  in.read(buf, sizeof buf);
  if (!in || std::memcmp(buf, kSnapshotMagic, 4) != 0)
    throw std::runtime_error(fmt::format("{} is not a snapshot file", path.string()));
  SnapshotHeader h;
  std::memcpy(&h.version, buf + 4, 4);
  std::memcpy(&h.N, buf + 8, 8);
  std::memcpy(&h.L_box, buf + 16, 8);
  std::memcpy(&h.c, buf + 24, 8);
  if (h.version != kSnapshotVersion)
    throw std::runtime_error(fmt::format("unsupported snapshot version {}", h.version));
  if (h.N < 2 || h.N > 4096) throw std::runtime_error("snapshot grid size out of range");
  RealField3 f(static_cast<int>(h.N));
  for (auto& c : f.comp) {
    in.read(reinterpret_cast<char*>(c.data()), static_cast<std::streamsize>(c.size() * sizeof(double)));
    if (!in) throw std::runtime_error(fmt::format("truncated snapshot {}", path.string()));
  }
  return {h, std::move(f)};
}

}  // namespace landau::spectral
