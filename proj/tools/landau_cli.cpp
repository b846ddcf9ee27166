#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "landau/harness.hpp"
#include "landau/parallel.hpp"

namespace harness = landau::harness;

namespace {

constexpr int kUsageError = 2;

void print_fit(const landau::fit::FitResult& r) {
  fmt::print("exponent = {:.10g}\nprefactor = {:.10g}\nwindow = {:.6g},{:.6g}\nr_squared = {:.6f}\nn_points = {}\n",
             r.exponent, r.prefactor, r.t_min, r.t_max, r.r_squared, r.n_points);
  if (!r.warning.empty()) fmt::print(stderr, "warning: {}\n", r.warning);
}

std::pair<double, double> window_or(const std::vector<double>& w, std::pair<double, double> fallback) {
  if (w.empty()) return fallback;
  if (w.size() != 2) throw CLI::ValidationError("--window", "expects two values A,B");
  return {w[0], w[1]};
}

}  // namespace

int main(int argc, char** argv) {
  landau::configure_threads_from_env();

  CLI::App app{"Landau solutions: field checks, Hardy constants, and perturbation dynamics"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify-landau", "pointwise and distributional checks of v_c");
  std::vector<double> c_list{2.0, 5.0, -3.0};
  bool skip_quadrature = false;
  std::uint64_t verify_seed = 2024;
  verify->add_option("--c", c_list, "comma-separated list of c values")->delimiter(',');
  verify->add_option("--seed", verify_seed, "seed for the random evaluation points");
  verify->add_flag("--no-quadrature", skip_quadrature, "skip the b(c) pairing checks");

  auto* sweep = app.add_subcommand("sweep-constants", "K_jk(c), K(c) over a c range, plus c0");
  std::vector<double> range{1.1, 100.0};
  int points = 50;
  double tolerance = 1e-8;
  std::string sweep_out;
  sweep->add_option("--range", range, "c range A,B")->delimiter(',')->expected(2);
  sweep->add_option("--points", points, "grid points (geometric in c - 1)");
  sweep->add_option("--tolerance", tolerance, "tolerance on K(c0) = 1");
  sweep->add_option("--out", sweep_out, "CSV file (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "run a configured simulation");
  std::string config_path, out_dir = "run";
  std::optional<std::uint64_t> seed;
  simulate->add_option("--config", config_path, "key = value configuration file")->required();
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_option("--seed", seed, "override the initial-data seed");

  auto* duhamel = app.add_subcommand("duhamel-check", "weak Duhamel identity over stored snapshots");
  std::string snapshot_dir;
  int n_quad = 0;
  duhamel->add_option("--out,--snapshots", snapshot_dir, "directory written by simulate")->required();
  duhamel->add_option("--n-quad", n_quad, "quadrature intervals (0 = every snapshot)");

  auto* fitcmd = app.add_subcommand("fit-decay", "power-law fit of a series column");
  std::string series_path, column = "norm";
  std::vector<double> window;
  std::string fit_config;
  fitcmd->add_option("--series", series_path, "series CSV")->required();
  fitcmd->add_option("--column", column, "column name; 'norm' is sqrt(E)");
  fitcmd->add_option("--window", window, "fit window A,B")->delimiter(',');
  fitcmd->add_option("--config", fit_config, "config used for the default window");

  auto* ces = app.add_subcommand("cesaro", "running time mean and majorization check");
  std::string ces_series, ces_column = "norm", ces_out;
  ces->add_option("--series", ces_series, "series CSV")->required();
  ces->add_option("--column", ces_column, "column name; 'norm' is sqrt(E)");
  ces->add_option("--out", ces_out, "CSV file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      harness::VerifyOptions opt;
      opt.seed = verify_seed;
      opt.quadrature = !skip_quadrature;
      harness::Report report;
      try {
        report = harness::cmd_verify_landau(c_list, opt);
      } catch (const std::invalid_argument& e) {
        fmt::print(stderr, "usage error: {}\n", e.what());
        return kUsageError;
      }
      report.print(std::cout);
      return report.all_pass() ? 0 : 1;
    }
    if (*sweep) {
      harness::SweepOptions opt;
      opt.c_min = range[0];
      opt.c_max = range[1];
      opt.points = points;
      opt.tolerance = tolerance;
      std::ofstream file;
      std::ostream* out = &std::cout;
      if (!sweep_out.empty()) {
        file.open(sweep_out);
        out = &file;
      }
      const auto res = harness::cmd_sweep_constants(opt, out);
      fmt::print(stderr, "c0 = {:.12g}, K nonincreasing: {}\n", res.c0, res.K_nonincreasing ? "yes" : "no");
      return res.K_nonincreasing ? 0 : 1;
    }
    if (*simulate) {
      const auto outcome = harness::cmd_simulate(config_path, out_dir, seed);
      const auto& s = outcome.series;
      fmt::print("series = {}\nsamples = {}\nsnapshots = {}\nK = {:.10g}\ncontent_hash = {}\n",
                 outcome.series_path.string(), s.samples.size(), outcome.snapshots, s.K,
                 outcome.manifest.content_hash);
      if (!s.coercive) fmt::print(stderr, "warning: K(c) >= 1, the energy inequality carries no guarantee\n");
      if (!s.error.empty()) {
        fmt::print(stderr, "error: {}\n", s.error);
        return 1;
      }
      return 0;
    }
    if (*duhamel) {
      const auto rep = harness::cmd_duhamel_check(snapshot_dir, n_quad);
      fmt::print("s = {:.10g}\nspacing = {:.10g}\nintervals = {}\nsource = {}\n", rep.s, rep.spacing,
                 rep.intervals, rep.nonlinear ? "nonlinear" : "none");
      for (std::size_t p = 0; p < rep.residual.size(); ++p)
        fmt::print("probe {}: lhs = {:.17g} rhs = {:.17g} residual = {:.3e}\n", p, rep.lhs[p], rep.rhs[p],
                   rep.residual[p]);
      fmt::print("max_residual = {:.3e}\n", rep.max_residual);
      return 0;
    }
    if (*fitcmd) {
      std::pair<double, double> fallback{0.0, 0.0};
      if (!fit_config.empty()) fallback = harness::default_window(landau::dynamics::load_config(fit_config));
      const auto [a, b] = window_or(window, fallback);
      print_fit(harness::cmd_fit_decay(series_path, column, a, b));
      return 0;
    }
    if (*ces) {
      const auto res = harness::cmd_cesaro(ces_series, ces_column);
      std::ofstream file;
      std::ostream* out = &std::cout;
      if (!ces_out.empty()) {
        file.open(ces_out);
        out = &file;
      }
      res.write_csv(*out);
      fmt::print(stderr, "majorization holds at every sample: {}\n", res.all_majorized ? "yes" : "no");
      return res.all_majorized ? 0 : 1;
    }
  } catch (const landau::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "usage error: {}\n", e.what());
    return kUsageError;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
