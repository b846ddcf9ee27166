#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <vector>

#include <fftw3.h>

#include "landau/common.hpp"
#include "landau/landau_field.hpp"

namespace landau::spectral {

/// Periodic box [-L, L)^3 sampled at N points per axis, shifted by `offset`
/// so that no node sits on the singular origin.
struct GridSpec {
  int N = 0;
  double L_box = 0.0;
  double R_cut = 0.0;
  double eps_core = 0.0;
  double offset = 0.0;

  double h() const { return 2.0 * L_box / N; }
  double k_unit() const;  // pi / L_box
  double volume() const { return 8.0 * L_box * L_box * L_box; }
  double node(int i) const { return -L_box + offset + h() * i; }
  /// Largest retained |integer wavenumber| under the 2/3 rule (3 K < N).
  int dealias_max() const { return (N - 1) / 3; }
  /// Radius beyond which the truncated background vanishes identically.
  double background_end() const { return L_box - (L_box - R_cut) / 10.0; }

  std::size_t real_size() const { return std::size_t(N) * N * N; }
  std::size_t complex_size() const { return std::size_t(N) * N * (N / 2 + 1); }
};

/// Validated grid with the default half-cell offset.
GridSpec make_grid(int N, double L_box, double R_cut, double eps_core);

template <typename T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() = default;
  template <typename U>
  FftwAllocator(const FftwAllocator<U>&) {}
  T* allocate(std::size_t n) {
    void* p = fftw_malloc(n * sizeof(T));
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) { fftw_free(p); }
  template <typename U>
  bool operator==(const FftwAllocator<U>&) const { return true; }
};

using RealArray = std::vector<double, FftwAllocator<double>>;
using Complex = std::complex<double>;
using ComplexArray = std::vector<Complex, FftwAllocator<Complex>>;

/// Three real components on the grid, x fastest: index ix + N (iy + N iz).
struct RealField3 {
  int N = 0;
  std::array<RealArray, 3> comp;

  RealField3() = default;
  explicit RealField3(int n);
  std::size_t index(int ix, int iy, int iz) const { return ix + std::size_t(N) * (iy + std::size_t(N) * iz); }
};

/// Half-spectrum coefficients (r2c layout, kx fastest) of a real 3-vector
/// field: f(x) = sum_k f_k exp(i k . (x - x_0)) with x_0 the first node.
struct SpectralField3 {
  int N = 0;
  std::array<ComplexArray, 3> comp;
  bool divergence_free = false;
  bool zero_mean = false;

  SpectralField3() = default;
  explicit SpectralField3(int n);
  void set_zero();
};

/// Nine gradient components, entry [3 j + k] = d_j f^k.
using GradientSamples = std::array<RealArray, 9>;

/// Grid plus FFT plans and wavenumber tables. Transforms of distinct arrays
/// may run concurrently; each 3-D transform itself is single threaded, so
/// results are independent of the thread count.
class SpectralSpace {
 public:
  explicit SpectralSpace(const GridSpec& grid);
  ~SpectralSpace();
  SpectralSpace(const SpectralSpace&) = delete;
  SpectralSpace& operator=(const SpectralSpace&) = delete;

  const GridSpec& grid() const { return grid_; }
  int N() const { return grid_.N; }
  int nh() const { return grid_.N / 2 + 1; }

  /// Signed integer wavenumber of an index along y or z (or x for r2c).
  int wavenumber(int i) const { return i <= grid_.N / 2 ? i : i - grid_.N; }
  bool is_nyquist(int ikx, int iky, int ikz) const;
  bool retained(int ikx, int iky, int ikz) const;
  /// Physical wavevector (zero along Nyquist directions).
  Vec3 wavevector(int ikx, int iky, int ikz) const { return {kx_[ikx], ky_[iky], ky_[ikz]}; }
  /// Per-axis tables behind wavevector(): kx over the half axis, ky (= kz) over the full axis.
  const std::vector<double>& kx() const { return kx_; }
  const std::vector<double>& ky() const { return ky_; }
  /// 1 on the kx = 0 and kx = N/2 planes, 2 elsewhere (half-spectrum weight).
  double mode_weight(int ikx) const { return (ikx == 0 || 2 * ikx == grid_.N) ? 1.0 : 2.0; }
  std::size_t cindex(int ikx, int iky, int ikz) const {
    return ikx + std::size_t(nh()) * (iky + std::size_t(grid_.N) * ikz);
  }

  void forward(const RealArray& in, ComplexArray& out) const;
  /// Leaves `in` untouched.
  void inverse(const ComplexArray& in, RealArray& out) const;

 private:
  GridSpec grid_;
  fftw_plan r2c_ = nullptr;
  fftw_plan c2r_ = nullptr;
  std::vector<double> kx_, ky_;
};

SpectralField3 transform_forward(const SpectralSpace& space, const RealField3& f);
RealField3 transform_inverse(const SpectralSpace& space, const SpectralField3& f);

/// Applies I - k k^T / |k|^2 per mode; zeroes the mean and Nyquist modes.
SpectralField3 leray_project(const SpectralSpace& space, const SpectralField3& f);
void leray_project_inplace(const SpectralSpace& space, SpectralField3& f);
/// Zeroes every mode with some |k_i| above the 2/3 cutoff.
void dealias(const SpectralSpace& space, SpectralField3& f);

/// Discrete L^2 inner product over the box (exact Parseval weights).
double inner_product(const SpectralSpace& space, const SpectralField3& a, const SpectralField3& b);
/// sum_j <d_j a, d_j b>
double gradient_inner_product(const SpectralSpace& space, const SpectralField3& a,
                              const SpectralField3& b);
double l2_norm(const SpectralSpace& space, const SpectralField3& f);
double h1_seminorm(const SpectralSpace& space, const SpectralField3& f);
/// h^3 sum |f|^2 on the grid.
double grid_l2_norm(const SpectralSpace& space, const RealField3& f);
/// max over modes of |k . f_k| / |f_k|.
double max_relative_divergence(const SpectralSpace& space, const SpectralField3& f);
bool is_dealiased(const SpectralSpace& space, const SpectralField3& f);

/// Physical samples of d_j f^k.
GradientSamples physical_gradient(const SpectralSpace& space, const SpectralField3& f);
/// Physical samples of curl f.
RealField3 physical_curl(const SpectralSpace& space, const SpectralField3& f);
/// Spectral -Delta f.
SpectralField3 negative_laplacian(const SpectralSpace& space, const SpectralField3& f);

/// Truncated, core-capped Landau field on the grid.
struct BackgroundField {
  bool active = false;
  double c = 0.0;
  /// curl(chi A) = chi v_c + grad chi x A, with A the vector potential of v_c,
  /// and v_c replaced by v_c(eps x/|x|) inside the core.
  RealField3 samples;
  /// Analytic gradient of the samples by the product rule.
  GradientSamples gradient_samples;
  /// Band-limited divergence-free background used by the discrete operators:
  /// the Leray projection of `samples` truncated to the dealiased modes.
  SpectralField3 spectral;
  RealField3 velocity;
  GradientSamples velocity_gradient;
  RealField3 vorticity;
  /// F = -Delta V + P((V . grad) V) for the band-limited V, so V is an exact
  /// steady state of the discrete system.
  RealField3 compensating_force;

  double max_pointwise_divergence = 0.0;  // of the samples, from the analytic gradient
  long cap_count = 0;
  double max_speed = 0.0;            // max |V| on the grid
  double projection_defect = 0.0;    // |samples - V|_2 / |samples|_2
};

/// Radial cutoff: 1 on [0, R_cut], quintic C^2 transition, 0 beyond background_end().
double cutoff(const GridSpec& grid, double r);
double cutoff_derivative(const GridSpec& grid, double r);
double cutoff_second_derivative(const GridSpec& grid, double r);

BackgroundField build_background(const LandauParams& params, const SpectralSpace& space);
BackgroundField zero_background(const SpectralSpace& space);

/// Max second-order central-difference divergence of the untruncated v_c over
/// nodes whose stencil lies in the annulus eps_core < |x| < R_cut.
double fd_divergence_max(const LandauParams& params, const GridSpec& grid);

struct NormRecord {
  double l2 = 0.0;
  double h1 = 0.0;  // |grad f|_2
  double l4 = 0.0;
  double lp = 0.0;
  double p = 4.0;
  double cross = 0.0;  // int f . (f . grad) V
};

NormRecord norms(const SpectralSpace& space, const SpectralField3& f,
                 const BackgroundField* background = nullptr, double p = 4.0);
/// Grid L^p norm of |f| (Euclidean vector magnitude).
double grid_lp_norm(const SpectralSpace& space, const RealField3& f, double p);
/// h^3 sum f_j f_k dV_k/dx_j over the grid.
double grid_cross_term(const SpectralSpace& space, const RealField3& f,
                       const GradientSamples& gradient);

void write_norm_header(std::ostream& out);
void write_norm_row(std::ostream& out, double t, const NormRecord& record);

// --- snapshots -------------------------------------------------------------

inline constexpr char kSnapshotMagic[4] = {'L', 'N', 'D', 'L'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct SnapshotHeader {
  std::uint32_t version = kSnapshotVersion;
  std::uint64_t N = 0;
  double L_box = 0.0;
  double c = 0.0;
};

/// 32-byte header (magic, u32 version, u64 N, f64 L_box, f64 c), then the three
/// components as little-endian f64, x fastest, component after component.
void write_snapshot(const std::filesystem::path& path, const SnapshotHeader& header,
                    const RealField3& f);
std::pair<SnapshotHeader, RealField3> read_snapshot(const std::filesystem::path& path);

}  // namespace landau::spectral
