#include "landau/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "landau/landau_field.hpp"
#include "landau/spectral_core.hpp"

namespace landau::harness {

namespace sp = landau::spectral;
namespace dyn = landau::dynamics;

std::string git_blob_sha1(std::string_view content) {
  const std::string header = fmt::format("blob {}", content.size());
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size() + 1) == 1 &&  // includes '\0'
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 digest failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

void write_manifest(std::ostream& out, const RunManifest& m) {
  out << "suite = " << m.suite << "\n";
  out << "config_path = " << m.config_path << "\n";
  out << "output_dir = " << m.output_dir << "\n";
  out << "seed = " << m.seed << "\n";
  out << "content_hash = " << m.content_hash << "\n";
}

void Report::add(std::string name, bool pass, std::string detail) {
  checks.push_back({std::move(name), pass, std::move(detail)});
}

bool Report::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void Report::print(std::ostream& out) const {
  for (const auto& c : checks) out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
}

// --- verify-landau ---------------------------------------------------------

namespace {

Vec3 random_point(std::mt19937_64& rng, double r_min, double r_max) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(r_min, r_max);
  Vec3 d{normal(rng), normal(rng), normal(rng)};
  const double n = norm(d);
  return (uniform(rng) / n) * d;
}

Vec3 rotate_about_axis(const Vec3& x, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {x[0], c * x[1] - s * x[2], s * x[1] + c * x[2]};
}

}  // namespace

Report cmd_verify_landau(const std::vector<double>& c_list, const VerifyOptions& options) {
  std::vector<LandauParams> params;
  for (double c : c_list) params.emplace_back(c);  // rejects |c| <= 1 before any work

  Report report;
  for (const auto& p : params) {
    const double c = p.c();
    std::mt19937_64 rng(options.seed);
    std::vector<Vec3> pts;
    for (int i = 0; i < options.points; ++i) pts.push_back(random_point(rng, options.r_min, options.r_max));

    double worst_res = 0.0, worst_div = 0.0, worst_hom = 0.0, worst_axi = 0.0;
    bool converged = true;
    for (const auto& x : pts) {
      const auto res = field::stationary_residual(p, x);
      worst_res = std::max(worst_res, norm(res.residual));
      converged = converged && res.converged;
      const Mat3 g = field::eval_velocity_gradient(p, x);
      worst_div = std::max(worst_div, std::abs(g[0][0] + g[1][1] + g[2][2]) / max_abs(g));
      const Vec3 v = field::eval_velocity(p, x);
      for (double lambda : {0.5, 2.0, 10.0}) {
        const Vec3 scaled = lambda * field::eval_velocity(p, lambda * x);
        worst_hom = std::max(worst_hom, norm(scaled - v) / norm(v));
      }
      for (double theta : {0.7, 2.1, 4.4}) {
        const Vec3 lhs = field::eval_velocity(p, rotate_about_axis(x, theta));
        worst_axi = std::max(worst_axi, norm(lhs - rotate_about_axis(v, theta)) / norm(v));
      }
    }
    report.add(fmt::format("c={} stationary residual", c), worst_res <= 1e-6 && converged,
               fmt::format("max |residual| {:.3e} over {} points (<= 1e-6)", worst_res, pts.size()));
    report.add(fmt::format("c={} divergence", c), worst_div <= 1e-12,
               fmt::format("max |tr grad v| / |grad v| {:.3e} (<= 1e-12)", worst_div));
    report.add(fmt::format("c={} homogeneity", c), worst_hom <= 1e-13,
               fmt::format("max relative defect {:.3e} (<= 1e-13)", worst_hom));
    report.add(fmt::format("c={} axisymmetry", c), worst_axi <= 1e-13,
               fmt::format("max relative defect {:.3e} (<= 1e-13)", worst_axi));

    if (!options.quadrature) continue;
    const double b = field::b_closed_form(p);
    const TestFunction phis[] = {TestFunction({0.0, 0.0, 0.0}, 1.0),
                                 TestFunction({0.3, 0.2, -0.1}, 1.5),
                                 TestFunction({0.5, 0.0, 0.0}, 0.8, 2.0)};
    double worst_b = 0.0, worst_transverse = 0.0, worst_divpair = 0.0;
    for (const auto& phi : phis) {
      const auto pair = field::distributional_pairing(p, phi);
      worst_b = std::max(worst_b, std::abs(pair.momentum[0] / phi.value_at_origin() - b) / std::abs(b));
      worst_transverse = std::max({worst_transverse, std::abs(pair.momentum[1]) / std::abs(b),
                                   std::abs(pair.momentum[2]) / std::abs(b)});
      worst_divpair = std::max(worst_divpair, std::abs(pair.divergence));
    }
    report.add(fmt::format("c={} b(c) quadrature", c), worst_b <= 1e-3,
               fmt::format("closed form {:.12g}, max relative error {:.3e} over 3 test functions (<= 1e-3)",
                           b, worst_b));
    report.add(fmt::format("c={} transverse pairings", c), worst_transverse <= 1e-6,
               fmt::format("max |k=2,3 pairing| / |b| {:.3e} (<= 1e-6)", worst_transverse));
    report.add(fmt::format("c={} divergence pairing", c), worst_divpair <= 1e-8,
               fmt::format("max |int v . grad phi| {:.3e} (<= 1e-8)", worst_divpair));
  }
  return report;
}

// --- sweep-constants -------------------------------------------------------

SweepResult cmd_sweep_constants(const SweepOptions& options, std::ostream* csv) {
  if (!(options.c_min > 1.0 && options.c_max > options.c_min) || options.points < 2)
    throw std::invalid_argument(fmt::format("sweep range [{}, {}] with {} points is invalid",
                                            options.c_min, options.c_max, options.points));
  SweepResult out;
  const int n = options.points;
  out.rows.resize(n);
  const double a = options.c_min - 1.0, ratio = (options.c_max - 1.0) / a;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    const double c = i == n - 1 ? options.c_max : 1.0 + a * std::pow(ratio, double(i) / (n - 1));
    out.rows[i] = hardy::build_constant_table(LandauParams(c));
  }
  out.c0 = hardy::find_c0(options.tolerance);
  const auto c0_row = hardy::build_constant_table(LandauParams(out.c0));
  auto pos = std::lower_bound(out.rows.begin(), out.rows.end(), out.c0,
                              [](const hardy::ConstantTable& t, double c) { return t.c < c; });
  out.c0_index = static_cast<std::size_t>(pos - out.rows.begin());
  out.rows.insert(pos, c0_row);
  for (std::size_t i = 1; i < out.rows.size(); ++i)
    if (out.rows[i].K > out.rows[i - 1].K * (1.0 + 1e-12)) out.K_nonincreasing = false;

  if (csv) {
    hardy::write_sweep_header(*csv);
    for (std::size_t i = 0; i < out.rows.size(); ++i)
      hardy::write_sweep_row(*csv, out.rows[i], i == out.c0_index ? "c0" : "");
  }
  return out;
}

// --- simulate --------------------------------------------------------------

SimulateOutcome simulate_config(const dyn::SimConfig& config, const std::filesystem::path& out_dir,
                                const std::string& config_label) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::ostringstream canonical;
  dyn::write_config(canonical, config);

  SimulateOutcome outcome;
  outcome.manifest.suite = "simulate";
  outcome.manifest.config_path = config_label;
  outcome.manifest.output_dir = out_dir.string();
  outcome.manifest.seed = config.initial.seed;
  outcome.manifest.content_hash = git_blob_sha1(canonical.str());
  {
    std::ofstream m(out_dir / "manifest.txt");
    write_manifest(m, outcome.manifest);
    std::ofstream c(out_dir / "config.txt");
    c << canonical.str();
  }

  dyn::Simulation sim(config);
  std::ofstream index;
  dyn::SnapshotSink sink;
  if (config.snapshot_interval > 0) {
    fs::create_directories(out_dir / "snapshots");
    index.open(out_dir / "snapshots.csv");
    index << "step,t,file\n";
    sink = [&](const dyn::State& s) {
      const std::string name = fmt::format("snapshots/snap_{:08d}.bin", s.step);
      sp::SnapshotHeader header;
      header.N = static_cast<std::uint64_t>(config.grid.N);
      header.L_box = config.grid.L_box;
      header.c = config.c;
      sp::write_snapshot(out_dir / name, header, sp::transform_inverse(sim.space, s.w));
      index << fmt::format("{},{:.17g},{}\n", s.step, s.t, name);
      ++outcome.snapshots;
    };
  }
  outcome.series = dyn::run(sim, sink);
  outcome.series_path = out_dir / "series.csv";
  std::ofstream csv(outcome.series_path);
  outcome.series.write_csv(csv);
  if (!outcome.series.error.empty()) {
    std::ofstream status(out_dir / "error.txt");
    status << outcome.series.error << "\n";
  }
  return outcome;
}

SimulateOutcome cmd_simulate(const std::filesystem::path& config_path,
                             const std::filesystem::path& out_dir, std::optional<std::uint64_t> seed) {
  dyn::SimConfig config = dyn::load_config(config_path);
  if (seed) config.initial.seed = *seed;
  return simulate_config(config, out_dir, config_path.string());
}

// --- duhamel-check ---------------------------------------------------------

std::vector<dyn::SpectralField3> duhamel_probes(const dyn::SpectralSpace& space) {
  struct Probe {
    Vec3 k;
    Vec3 a;
  };
  const Probe probes[] = {{{1, 0, 0}, {0, 1, 0}},
                          {{0, 1, 0}, {0, 0, 1}},
                          {{0, 0, 1}, {1, 0, 0}},
                          {{1, 1, 0}, {0, 0, 1}}};
  const auto& g = space.grid();
  const double u = g.k_unit();
  std::vector<dyn::SpectralField3> out;
  for (const auto& p : probes) {
    sp::RealField3 f(g.N);
    for (int iz = 0; iz < g.N; ++iz)
      for (int iy = 0; iy < g.N; ++iy)
        for (int ix = 0; ix < g.N; ++ix) {
          const double phase = u * (p.k[0] * g.node(ix) + p.k[1] * g.node(iy) + p.k[2] * g.node(iz));
          const std::size_t i = f.index(ix, iy, iz);
          for (int c = 0; c < 3; ++c) f.comp[c][i] = p.a[c] * std::cos(phase);
        }
    auto s = sp::transform_forward(space, f);
    sp::leray_project_inplace(space, s);
    sp::dealias(space, s);
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

struct SnapshotEntry {
  long step;
  double t;
  std::string file;
};

std::vector<SnapshotEntry> read_snapshot_index(const std::filesystem::path& dir) {
  std::ifstream in(dir / "snapshots.csv");
  if (!in) throw Error(fmt::format("no snapshots.csv in {}", dir.string()));
  std::string line;
  std::getline(in, line);
  std::vector<SnapshotEntry> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string step, t, file;
    std::getline(ss, step, ',');
    std::getline(ss, t, ',');
    std::getline(ss, file);
    out.push_back({std::stol(step), std::stod(t), file});
  }
  return out;
}

}  // namespace

DuhamelReport cmd_duhamel_check(const std::filesystem::path& dir, int n_quad) {
  const dyn::SimConfig config = dyn::load_config(dir / "config.txt");
  if (config.mode == dyn::Mode::linear_Lstar)
    throw Error("the Duhamel check needs a nonlinear or linear_L run");
  const auto index = read_snapshot_index(dir);
  if (index.size() < 2) throw Error(fmt::format("insufficient snapshots in {}: need at least 2", dir.string()));
  if (index.front().step != 0) throw Error("the first snapshot must be the initial state");
  const long gap = index[1].step - index[0].step;
  for (std::size_t i = 1; i < index.size(); ++i)
    if (index[i].step - index[i - 1].step != gap || gap <= 0)
      throw Error("snapshot times are not uniformly spaced");
  const int available = static_cast<int>(index.size()) - 1;
  if (n_quad <= 0) n_quad = available;
  if (available % n_quad != 0)
    throw Error(fmt::format("n_quad = {} does not divide the {} snapshot intervals", n_quad, available));
  const int stride = available / n_quad;

  dyn::Simulation sim(config);
  auto load = [&](int j) {
    auto [header, field] = sp::read_snapshot(dir / index[static_cast<std::size_t>(j * stride)].file);
    if (field.N != config.grid.N) throw Error("snapshot grid does not match config.txt");
    auto f = sp::transform_forward(sim.space, field);
    sp::dealias(sim.space, f);
    sp::leray_project_inplace(sim.space, f);
    return f;
  };

  DuhamelReport rep;
  rep.intervals = n_quad;
  rep.nonlinear = config.mode == dyn::Mode::nonlinear;
  rep.spacing = config.dt * static_cast<double>(gap * stride);
  rep.s = config.dt * static_cast<double>(index.back().step);

  const auto probes = duhamel_probes(sim.space);
  std::vector<dyn::State> phi(probes.size());
  for (std::size_t p = 0; p < probes.size(); ++p) phi[p].w = probes[p];
  std::vector<double> source(probes.size(), 0.0);
  const dyn::Stepper adjoint(sim.ops, dyn::Mode::linear_Lstar, config.dt);

  // phi_j = e^{-j h L*} psi is paired with the source at tau = s - j h.
  for (int j = 0; j <= n_quad; ++j) {
    if (rep.nonlinear) {
      const auto src = sim.ops.nonlinear(load(n_quad - j));
      const double weight = (j == 0 || j == n_quad) ? 0.5 : 1.0;
      for (std::size_t p = 0; p < probes.size(); ++p)
        source[p] += weight * rep.spacing * sp::inner_product(sim.space, src, phi[p].w);
    }
    if (j < n_quad)
      for (auto& state : phi)
        for (long k = 0; k < gap * stride; ++k) adjoint.step(state);
  }

  const auto w0 = load(0);
  const auto ws = load(n_quad);
  const double w0_norm = sp::l2_norm(sim.space, w0);
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const double lhs = sp::inner_product(sim.space, ws, probes[p]);
    const double rhs = sp::inner_product(sim.space, w0, phi[p].w) - source[p];
    const double scale = w0_norm * sp::l2_norm(sim.space, probes[p]);
    const double r = scale > 0.0 ? std::abs(lhs - rhs) / scale : std::abs(lhs - rhs);
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(rhs);
    rep.residual.push_back(r);
    rep.max_residual = std::max(rep.max_residual, r);
  }
  return rep;
}

// --- series tools ----------------------------------------------------------

std::vector<double> SeriesTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return columns[i];
  if (name == "norm") {
    auto e = column("E");
    for (auto& v : e) v = std::sqrt(std::max(0.0, v));
    return e;
  }
  throw std::invalid_argument(fmt::format("series has no column '{}'", name));
}

SeriesTable read_series(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw std::runtime_error(fmt::format("cannot open series {}", csv.string()));
  SeriesTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(fmt::format("{} is empty", csv.string()));
  {
    std::istringstream ss(line);
    std::string name;
    while (std::getline(ss, name, ',')) table.names.push_back(name);
  }
  table.columns.resize(table.names.size());
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col >= table.names.size())
        throw std::runtime_error(fmt::format("{}:{}: too many fields", csv.string(), row));
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str())
        throw std::runtime_error(fmt::format("{}:{}: '{}' is not a number", csv.string(), row, cell));
      table.columns[col++].push_back(v);
    }
    if (col != table.names.size())
      throw std::runtime_error(fmt::format("{}:{}: expected {} fields", csv.string(), row, table.names.size()));
  }
  return table;
}

std::pair<double, double> default_window(const dyn::SimConfig& config) {
  return {5.0 * config.dt * config.diagnostic_interval, 0.5 * config.T_end};
}

fit::FitResult cmd_fit_decay(const std::filesystem::path& series_csv, const std::string& column,
                             double t_min, double t_max) {
  const auto table = read_series(series_csv);
  const auto t = table.column("t");
  const auto v = table.column(column);
  return fit::fit_power_law(t, v, t_min, t_max);
}

CesaroResult cesaro(const std::vector<double>& t, const std::vector<double>& value) {
  CesaroResult r;
  r.t = t;
  r.value = value;
  r.mean = fit::running_mean(t, value);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::isnan(r.mean[i])) r.mean[i] = value[i];  // t = 0: the limit of the mean
    const bool ok = t[i] == 0.0 || value[i] <= r.mean[i] * (1.0 + 1e-12);
    r.majorized.push_back(ok);
    r.all_majorized = r.all_majorized && ok;
    if (i > 0 && r.mean[i] > r.mean[i - 1] * (1.0 + 1e-12)) r.mean_nonincreasing = false;
  }
  return r;
}

void CesaroResult::write_csv(std::ostream& out) const {
  out << "t,value,mean,majorized\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    out << fmt::format("{:.17g},{:.17g},{:.17g},{}\n", t[i], value[i], mean[i], majorized[i] ? 1 : 0);
}

CesaroResult cmd_cesaro(const std::filesystem::path& series_csv, const std::string& column) {
  const auto table = read_series(series_csv);
  return cesaro(table.column("t"), table.column(column));
}

}  // namespace landau::harness
