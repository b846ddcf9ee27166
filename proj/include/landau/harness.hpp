#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "landau/dynamics.hpp"
#include "landau/fit.hpp"
#include "landau/hardy_constants.hpp"

namespace landau::harness {

/// Hex SHA-1 of "blob <size>\0<content>", as computed by `git hash-object`.
std::string git_blob_sha1(std::string_view content);

struct RunManifest {
  std::string suite;
  std::string config_path;
  std::string output_dir;
  std::uint64_t seed = 0;
  std::string content_hash;  // git_blob_sha1 of the canonical config text
};

void write_manifest(std::ostream& out, const RunManifest& manifest);

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Report {
  std::vector<Check> checks;

  void add(std::string name, bool pass, std::string detail);
  bool all_pass() const;
  /// One "PASS name: detail" / "FAIL name: detail" line per check.
  void print(std::ostream& out) const;
};

// --- verify-landau ---------------------------------------------------------

struct VerifyOptions {
  int points = 200;
  double r_min = 0.3;
  double r_max = 5.0;
  std::uint64_t seed = 2024;
  bool quadrature = true;  // run the b(c) pairing checks
};

/// Stationary residual, divergence, homogeneity, axisymmetry and b(c)
/// consistency for each c. Throws std::invalid_argument for |c| <= 1.
Report cmd_verify_landau(const std::vector<double>& c_list, const VerifyOptions& options = {});

// --- sweep-constants -------------------------------------------------------

struct SweepOptions {
  double c_min = 1.1;
  double c_max = 100.0;
  int points = 50;          // geometric in c - 1
  double tolerance = 1e-8;  // for c0
};

struct SweepResult {
  std::vector<hardy::ConstantTable> rows;  // sorted by c, includes the c0 row
  std::size_t c0_index = 0;
  double c0 = 0.0;
  bool K_nonincreasing = true;
};

/// Tables on the grid plus the c0 row; writes CSV (flag column "c0" on the
/// threshold row) when `csv` is non-null.
SweepResult cmd_sweep_constants(const SweepOptions& options, std::ostream* csv = nullptr);

// --- simulate --------------------------------------------------------------

struct SimulateOutcome {
  dynamics::DiagnosticSeries series;
  RunManifest manifest;
  std::filesystem::path series_path;
  int snapshots = 0;
};

/// Runs the configured simulation and writes into out_dir: manifest.txt,
/// config.txt (canonical form), series.csv, and when snapshot_interval > 0
/// snapshots/snap_<step>.bin with the index snapshots.csv (step,t,file).
SimulateOutcome cmd_simulate(const std::filesystem::path& config_path,
                             const std::filesystem::path& out_dir,
                             std::optional<std::uint64_t> seed = std::nullopt);
/// Same, from an in-memory config.
SimulateOutcome simulate_config(const dynamics::SimConfig& config,
                                const std::filesystem::path& out_dir,
                                const std::string& config_label = "<memory>");

// --- duhamel-check ---------------------------------------------------------

struct DuhamelReport {
  double s = 0.0;             // evaluation time (last snapshot used)
  double spacing = 0.0;       // quadrature step in tau
  int intervals = 0;
  bool nonlinear = true;
  std::vector<double> lhs;    // (w(s), psi) per probe
  std::vector<double> rhs;    // semigroup term minus the source integral
  std::vector<double> residual;  // |lhs - rhs| / (|w0| |psi|), or absolute when w0 = 0
  double max_residual = 0.0;
};

/// Weak Duhamel identity (w(s), psi) = (w0, e^{-sL*} psi)
///   - int_0^s (P[(w . grad) w](tau), e^{-(s - tau)L*} psi) dtau
/// for low-wavenumber divergence-free probes psi, trapezoid rule in tau over
/// the stored snapshots. n_quad = 0 uses every snapshot; otherwise it must
/// divide the number of snapshot intervals. Throws Error when fewer than two
/// snapshots exist or their spacing is not uniform.
DuhamelReport cmd_duhamel_check(const std::filesystem::path& snapshot_dir, int n_quad = 0);

/// The probe fields: cos(k . x) a with a . k = 0 for a few lattice k.
std::vector<dynamics::SpectralField3> duhamel_probes(const dynamics::SpectralSpace& space);

// --- series tools ----------------------------------------------------------

struct SeriesTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  /// Column by name; "norm" falls back to sqrt(E) when absent.
  std::vector<double> column(const std::string& name) const;
};

SeriesTable read_series(const std::filesystem::path& csv);

/// Default window [5 dt diagnostic_interval, T_end / 2].
std::pair<double, double> default_window(const dynamics::SimConfig& config);

fit::FitResult cmd_fit_decay(const std::filesystem::path& series_csv, const std::string& column,
                             double t_min, double t_max);

struct CesaroResult {
  std::vector<double> t, value, mean;
  std::vector<bool> majorized;  // value <= mean (relative slack 1e-12); true at t = 0
  bool all_majorized = true;
  bool mean_nonincreasing = true;

  void write_csv(std::ostream& out) const;
};

CesaroResult cesaro(const std::vector<double>& t, const std::vector<double>& value);
/// Running mean of `column` (default "norm", i.e. |w|_2).
CesaroResult cmd_cesaro(const std::filesystem::path& series_csv, const std::string& column = "norm");

}  // namespace landau::harness
