#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "landau/fit.hpp"
#include "landau/landau_field.hpp"
#include "landau/spectral_core.hpp"

namespace landau::dynamics {

using spectral::BackgroundField;
using spectral::GridSpec;
using spectral::SpectralField3;
using spectral::SpectralSpace;

enum class Mode { nonlinear, linear_L, linear_Lstar };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

enum class InitialKind { random_lowpass, rough, gaussian_bump, lp_bump, zero, snapshot };

std::string to_string(InitialKind kind);
InitialKind parse_initial_kind(const std::string& text);

struct InitialData {
  InitialKind kind = InitialKind::random_lowpass;
  std::uint64_t seed = 1;
  double amplitude = 1.0;   // target L^2 norm (ignored for zero data)
  double k0 = 2.0;          // spectral peak of the low-pass family
  double rough_slope = 1.5; // |z_k| ~ |k|^-slope for the rough family
  double width = 0.5;       // bump width
  double bump_p = 1.5;      // lp_bump: envelope (1 + r^2/width^2)^(-3/(2p))
  std::filesystem::path snapshot_path;
};

struct SimConfig {
  double c = 2.0;
  GridSpec grid;
  double dt = 0.01;
  double T_end = 1.0;
  Mode mode = Mode::nonlinear;
  InitialData initial;
  int diagnostic_interval = 10;
  int snapshot_interval = 0;  // 0 disables snapshots
  double norm_p = 1.5;        // exponent of the optional L^p column
  bool background = true;     // false drops v_c (pure Stokes / Navier-Stokes)

  long steps() const;
};

/// Parses `key = value` lines ('#' starts a comment). Keys: c, c_over_c0, N,
/// L_box, R_cut, eps_core, dt, T_end, mode, initial, seed, amplitude, k0,
/// rough_slope, width, bump_p, snapshot_path, diagnostic_interval,
/// snapshot_interval, norm_p, background. R_cut and eps_core default to
/// 0.8 L_box and 0.05 L_box. Errors carry the line number.
SimConfig parse_config(std::istream& in, const std::string& source = "<config>");
SimConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const SimConfig& config);

/// Matrix-free linearized operators about a (band-limited) background V.
/// All outputs are dealiased and Leray projected.
class Operators {
 public:
  Operators(const SpectralSpace& space, const BackgroundField& background);

  const SpectralSpace& space() const { return space_; }
  const BackgroundField& background() const { return background_; }

  /// -Delta z + P[(z . grad) V + (V . grad) z]
  SpectralField3 apply_L(const SpectralField3& z) const;
  /// -Delta z + P[(grad V) z - (V . grad) z], with ((grad V) z)_j = sum_k d_j V^k z^k
  SpectralField3 apply_Lstar(const SpectralField3& z) const;
  /// P[(z . grad) V + (V . grad) z]
  SpectralField3 coupling(const SpectralField3& z) const;
  SpectralField3 coupling_adjoint(const SpectralField3& z) const;
  /// P[(w . grad) w]
  SpectralField3 nonlinear(const SpectralField3& w) const;
  /// P[(w . grad) V + (V . grad) w + (w . grad) w]; also reports max |w| on the grid.
  SpectralField3 perturbation_advection(const SpectralField3& w, double* max_speed = nullptr) const;

  struct FormParts {
    double dirichlet = 0.0;  // int grad z : grad v
    double stretch = 0.0;    // int (z . grad) V . v
    double transport = 0.0;  // int (V . grad) z . v
    double total() const { return dirichlet + stretch + transport; }
  };
  FormParts form_aL(const SpectralField3& z, const SpectralField3& v) const;

  /// -Delta V - P[(V . grad) V] + F for the stored compensating force,
  /// relative to |Delta V|_2: zero up to roundoff by construction.
  double equilibrium_residual() const;

 private:
  enum class Product { coupling, coupling_adjoint, nonlinear, perturbation };
  SpectralField3 product(const SpectralField3& z, Product kind, double* max_speed) const;

  const SpectralSpace& space_;
  const BackgroundField& background_;
};

/// exp(-|k|^2 h) applied per mode.
void apply_heat(const SpectralSpace& space, SpectralField3& f, double h);

struct State {
  double t = 0.0;
  long step = 0;
  SpectralField3 w;
};

/// Integrating-factor SSP-RK3 for w_t = Delta w - g(w), with g the projected
/// advection of the chosen mode. The linear_Lstar step is the exact transpose
/// of the linear_L step under the discrete inner product, so the two
/// propagators are adjoint to roundoff.
class Stepper {
 public:
  Stepper(const Operators& ops, Mode mode, double dt);

  /// Throws CflError when dt exceeds 0.5 h / (max|V| + max|w|) (checked every
  /// stage in nonlinear mode) and BlowUpError on non-finite energy.
  void step(State& state) const;

  double dt() const { return dt_; }
  Mode mode() const { return mode_; }
  double cfl_limit(double max_w) const;

 private:
  SpectralField3 rhs(const SpectralField3& w, Mode mode) const;
  void forward_step(State& state) const;
  void transpose_step(State& state) const;
  void heat(SpectralField3& f, const std::vector<double>& factor) const;

  const Operators& ops_;
  Mode mode_;
  double dt_;
  std::vector<double> e_full_, e_half_, e_back_;  // exp(-|k|^2 h) for h = dt, dt/2, -dt/2
};

struct Sample {
  double t = 0.0;
  double E = 0.0;     // |w|_2^2
  double D = 0.0;     // |grad w|_2^2
  double X = 0.0;     // int w . (w . grad) V
  double cumD = 0.0;  // int_0^t D (trapezoid over every step)
  double rho = 0.0;   // max over earlier samples s of E(t) + 2(1-K) int_s^t D - E(s)
  double L4 = 0.0;
  double Lp = 0.0;
};

struct DiagnosticSeries {
  std::vector<Sample> samples;
  double norm_p = 1.5;
  double K = 0.0;
  bool coercive = true;  // K < 1
  std::string error;     // non-empty when the run stopped early

  void write_csv(std::ostream& out) const;
};

/// Builds w0 from the initial-data settings: projected, dealiased, zero mean.
SpectralField3 make_initial(const SpectralSpace& space, const InitialData& spec);

struct Simulation {
  SimConfig config;
  LandauParams params;
  SpectralSpace space;
  BackgroundField background;
  Operators ops;

  explicit Simulation(const SimConfig& config);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;
};

using SnapshotSink = std::function<void(const State&)>;

/// Integrates to T_end, recording diagnostics every diagnostic_interval steps
/// (and at the final step). Solver errors end the run and are reported in
/// DiagnosticSeries::error with the samples collected so far.
DiagnosticSeries run(Simulation& sim, const SnapshotSink& snapshots = {});
DiagnosticSeries run(const SimConfig& config, const SnapshotSink& snapshots = {});

struct ProbeRecord {
  double t = 0.0;
  double norm = 0.0;       // |z|_2
  double grad_norm = 0.0;  // |grad z|_2
  double L_norm = 0.0;     // |L z|_2
  double a_energy = 0.0;   // a_L(z, z)
};

/// Evolves z0 under linear_L and probes at the steps nearest to each time.
std::vector<ProbeRecord> semigroup_probe(const Simulation& sim, const SpectralField3& z0,
                                         const std::vector<double>& probe_times);

struct HypercontractivityResult {
  fit::FitResult fit;
  std::vector<double> t;
  std::vector<double> norm;
  double p = 1.5;
  double z0_lp = 0.0;
  double target_exponent = 0.0;  // -3/2 (1/p - 1/2)
};

/// Evolves z0 under linear_L, samples |z(t)|_2 at n_samples geometric times in
/// [t_min, t_max] and fits a power law.
HypercontractivityResult hypercontractivity_probe(const Simulation& sim, double p,
                                                  const SpectralField3& z0, double t_min,
                                                  double t_max, int n_samples = 16);

}  // namespace landau::dynamics
