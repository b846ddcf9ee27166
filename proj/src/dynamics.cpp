#include "landau/dynamics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "landau/hardy_constants.hpp"
#include "landau/parallel.hpp"

namespace landau::dynamics {

using spectral::Complex;
using spectral::ComplexArray;
using spectral::GradientSamples;
using spectral::RealField3;

// --- enums -----------------------------------------------------------------

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::nonlinear: return "nonlinear";
    case Mode::linear_L: return "linear_L";
    case Mode::linear_Lstar: return "linear_Lstar";
  }
  return "?";
}

Mode parse_mode(const std::string& text) {
  for (Mode m : {Mode::nonlinear, Mode::linear_L, Mode::linear_Lstar})
    if (text == to_string(m)) return m;
  throw ConfigError(fmt::format("unknown mode '{}' (nonlinear, linear_L, linear_Lstar)", text));
}

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::random_lowpass: return "random_lowpass";
    case InitialKind::rough: return "rough";
    case InitialKind::gaussian_bump: return "gaussian_bump";
    case InitialKind::lp_bump: return "lp_bump";
    case InitialKind::zero: return "zero";
    case InitialKind::snapshot: return "snapshot";
  }
  return "?";
}

InitialKind parse_initial_kind(const std::string& text) {
  for (InitialKind k : {InitialKind::random_lowpass, InitialKind::rough, InitialKind::gaussian_bump,
                        InitialKind::lp_bump, InitialKind::zero, InitialKind::snapshot})
    if (text == to_string(k)) return k;
  throw ConfigError(fmt::format(
      "unknown initial data '{}' (random_lowpass, rough, gaussian_bump, lp_bump, zero, snapshot)",
      text));
}

// --- config ----------------------------------------------------------------

long SimConfig::steps() const { return std::lround(T_end / dt); }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError(fmt::format("'{}' is not a finite number", text));
  return v;
}

long long to_integer(const std::string& text) {
  long long v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(fmt::format("'{}' is not an integer", text));
  return v;
}

bool to_bool(const std::string& text) {
  if (text == "true" || text == "on" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "off" || text == "0" || text == "no") return false;
  throw ConfigError(fmt::format("'{}' is not a boolean", text));
}

}  // namespace

SimConfig parse_config(std::istream& in, const std::string& source) {
  SimConfig cfg;
  int N = 64;
  double L_box = 2.0 * std::numbers::pi;
  std::optional<double> R_cut, eps_core, c_over_c0, c;
  std::map<std::string, int> seen;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(fmt::format("{}:{}: expected 'key = value'", source, lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError(fmt::format("{}:{}: empty value for '{}'", source, lineno, key));
    if (auto [it, fresh] = seen.emplace(key, lineno); !fresh)
      throw ConfigError(
          fmt::format("{}:{}: '{}' already set on line {}", source, lineno, key, it->second));
    try {
      if (key == "c") c = to_double(value);
      else if (key == "c_over_c0") c_over_c0 = to_double(value);
      else if (key == "N") N = static_cast<int>(to_integer(value));
      else if (key == "L_box") L_box = to_double(value);
      else if (key == "R_cut") R_cut = to_double(value);
      else if (key == "eps_core") eps_core = to_double(value);
      else if (key == "dt") cfg.dt = to_double(value);
      else if (key == "T_end") cfg.T_end = to_double(value);
      else if (key == "mode") cfg.mode = parse_mode(value);
      else if (key == "initial") cfg.initial.kind = parse_initial_kind(value);
      else if (key == "seed") cfg.initial.seed = static_cast<std::uint64_t>(to_integer(value));
      else if (key == "amplitude") cfg.initial.amplitude = to_double(value);
      else if (key == "k0") cfg.initial.k0 = to_double(value);
      else if (key == "rough_slope") cfg.initial.rough_slope = to_double(value);
      else if (key == "width") cfg.initial.width = to_double(value);
      else if (key == "bump_p") cfg.initial.bump_p = to_double(value);
      else if (key == "snapshot_path") cfg.initial.snapshot_path = value;
      else if (key == "diagnostic_interval") cfg.diagnostic_interval = static_cast<int>(to_integer(value));
      else if (key == "snapshot_interval") cfg.snapshot_interval = static_cast<int>(to_integer(value));
      else if (key == "norm_p") cfg.norm_p = to_double(value);
      else if (key == "background") cfg.background = to_bool(value);
      else throw ConfigError(fmt::format("unknown key '{}'", key));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{}:{}: {}", source, lineno, e.what()));
    }
  }

  if (c && c_over_c0) throw ConfigError(fmt::format("{}: set either c or c_over_c0, not both", source));
  if (c_over_c0) c = *c_over_c0 * hardy::threshold_c0();
  if (c) cfg.c = *c;
  if (!(std::abs(cfg.c) > 1.0 + 1e-9))
    throw ConfigError(fmt::format("{}: |c| must exceed 1, got {}", source, cfg.c));
  try {
    cfg.grid = spectral::make_grid(N, L_box, R_cut.value_or(0.8 * L_box),
                                   eps_core.value_or(0.05 * L_box));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("{}: invalid grid: {}", source, e.what()));
  }
  if (!(cfg.dt > 0.0) || !(cfg.T_end > 0.0))
    throw ConfigError(fmt::format("{}: dt and T_end must be positive", source));
  if (cfg.steps() < 1) throw ConfigError(fmt::format("{}: T_end is shorter than one step", source));
  if (cfg.diagnostic_interval < 1 || cfg.snapshot_interval < 0)
    throw ConfigError(fmt::format("{}: intervals must be positive (snapshot_interval may be 0)", source));
  if (!(cfg.norm_p >= 1.0)) throw ConfigError(fmt::format("{}: norm_p must be >= 1", source));
  if (cfg.initial.kind == InitialKind::snapshot && cfg.initial.snapshot_path.empty())
    throw ConfigError(fmt::format("{}: initial = snapshot needs snapshot_path", source));
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config {}", path.string()));
  return parse_config(in, path.string());
}

void write_config(std::ostream& out, const SimConfig& cfg) {
  out << fmt::format("c = {:.17g}\n", cfg.c);
  out << fmt::format("N = {}\n", cfg.grid.N);
  out << fmt::format("L_box = {:.17g}\n", cfg.grid.L_box);
  out << fmt::format("R_cut = {:.17g}\n", cfg.grid.R_cut);
  out << fmt::format("eps_core = {:.17g}\n", cfg.grid.eps_core);
  out << fmt::format("dt = {:.17g}\n", cfg.dt);
  out << fmt::format("T_end = {:.17g}\n", cfg.T_end);
  out << fmt::format("mode = {}\n", to_string(cfg.mode));
  out << fmt::format("initial = {}\n", to_string(cfg.initial.kind));
  out << fmt::format("seed = {}\n", cfg.initial.seed);
  out << fmt::format("amplitude = {:.17g}\n", cfg.initial.amplitude);
  out << fmt::format("k0 = {:.17g}\n", cfg.initial.k0);
  out << fmt::format("rough_slope = {:.17g}\n", cfg.initial.rough_slope);
  out << fmt::format("width = {:.17g}\n", cfg.initial.width);
  out << fmt::format("bump_p = {:.17g}\n", cfg.initial.bump_p);
  if (!cfg.initial.snapshot_path.empty())
    out << fmt::format("snapshot_path = {}\n", cfg.initial.snapshot_path.string());
  out << fmt::format("diagnostic_interval = {}\n", cfg.diagnostic_interval);
  out << fmt::format("snapshot_interval = {}\n", cfg.snapshot_interval);
  out << fmt::format("norm_p = {:.17g}\n", cfg.norm_p);
  out << fmt::format("background = {}\n", cfg.background ? "true" : "false");
}

// --- operators -------------------------------------------------------------

Operators::Operators(const SpectralSpace& space, const BackgroundField& background)
    : space_(space), background_(background) {}

// The products use the rotational form: (a . grad) b + (b . grad) a differs
// from -(a x curl b) - (b x curl a) by a gradient, which the projection removes
// exactly on the retained modes. Only z and curl z need transforms.
SpectralField3 Operators::product(const SpectralField3& z, Product kind, double* max_speed) const {
  const RealField3 zp = spectral::transform_inverse(space_, z);
  const RealField3 wz = spectral::physical_curl(space_, z);
  const auto& V = background_.velocity.comp;
  const auto& wV = background_.vorticity.comp;
  const auto& gV = background_.velocity_gradient;
  const int n = space_.N();
  RealField3 g(n);
  const std::size_t total = space_.grid().real_size();
  double speed2 = 0.0;
#pragma omp parallel for schedule(static) reduction(max : speed2)
  for (std::size_t i = 0; i < total; ++i) {
    const Vec3 zi{zp.comp[0][i], zp.comp[1][i], zp.comp[2][i]};
    const Vec3 oz{wz.comp[0][i], wz.comp[1][i], wz.comp[2][i]};
    const Vec3 Vi{V[0][i], V[1][i], V[2][i]};
    const Vec3 oV{wV[0][i], wV[1][i], wV[2][i]};
    speed2 = std::max(speed2, dot(zi, zi));
    Vec3 r{};
    switch (kind) {
      case Product::coupling:
        r = cross(oz, Vi) + cross(oV, zi);
        break;
      case Product::coupling_adjoint: {
        // (grad V) z - (V . grad) z = 2 (z . grad) V + 2 z x curl V + V x curl z + gradient
        Vec3 zgV{};
        for (int k = 0; k < 3; ++k)
          for (int j = 0; j < 3; ++j) zgV[k] += zi[j] * gV[3 * j + k][i];
        r = 2.0 * zgV + 2.0 * cross(zi, oV) + cross(Vi, oz);
        break;
      }
      case Product::nonlinear:
        r = cross(oz, zi);
        break;
      case Product::perturbation:
        r = cross(oz, Vi + zi) + cross(oV, zi);
        break;
    }
    for (int k = 0; k < 3; ++k) g.comp[k][i] = r[k];
  }
  if (max_speed) *max_speed = std::sqrt(speed2);
  SpectralField3 out = spectral::transform_forward(space_, g);
  spectral::dealias(space_, out);
  spectral::leray_project_inplace(space_, out);
  return out;
}

SpectralField3 Operators::coupling(const SpectralField3& z) const {
  return product(z, Product::coupling, nullptr);
}

SpectralField3 Operators::coupling_adjoint(const SpectralField3& z) const {
  return product(z, Product::coupling_adjoint, nullptr);
}

SpectralField3 Operators::nonlinear(const SpectralField3& w) const {
  return product(w, Product::nonlinear, nullptr);
}

SpectralField3 Operators::perturbation_advection(const SpectralField3& w, double* max_speed) const {
  return product(w, Product::perturbation, max_speed);
}

namespace {

void add_scaled(SpectralField3& y, double a, const SpectralField3& x) {
  for (int c = 0; c < 3; ++c) {
    auto& yc = y.comp[c];
    const auto& xc = x.comp[c];
    const std::size_t n = yc.size();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) yc[i] += a * xc[i];
  }
}

void scale(SpectralField3& y, double a) {
  for (auto& c : y.comp)
    for (auto& v : c) v *= a;
}

void mark_solenoidal(SpectralField3& f) {
  f.divergence_free = true;
  f.zero_mean = true;
}

}  // namespace

SpectralField3 Operators::apply_L(const SpectralField3& z) const {
  SpectralField3 out = spectral::negative_laplacian(space_, z);
  add_scaled(out, 1.0, coupling(z));
  mark_solenoidal(out);
  return out;
}

SpectralField3 Operators::apply_Lstar(const SpectralField3& z) const {
  SpectralField3 out = spectral::negative_laplacian(space_, z);
  add_scaled(out, 1.0, coupling_adjoint(z));
  mark_solenoidal(out);
  return out;
}

Operators::FormParts Operators::form_aL(const SpectralField3& z, const SpectralField3& v) const {
  FormParts parts;
  parts.dirichlet = spectral::gradient_inner_product(space_, z, v);
  const RealField3 zp = spectral::transform_inverse(space_, z);
  const RealField3 vp = spectral::transform_inverse(space_, v);
  const GradientSamples gz = spectral::physical_gradient(space_, z);
  const auto& V = background_.velocity.comp;
  const auto& gV = background_.velocity_gradient;
  const int n = space_.N();
  const std::size_t slab = std::size_t(n) * n;
  const double h = space_.grid().h();
  const double w = h * h * h;
  parts.stretch = w * ordered_sum(n, [&](int iz) {
    double acc = 0.0;
    for (std::size_t i = iz * slab; i < (iz + 1) * slab; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) acc += zp.comp[j][i] * gV[3 * j + k][i] * vp.comp[k][i];
    return acc;
  });
  parts.transport = w * ordered_sum(n, [&](int iz) {
    double acc = 0.0;
    for (std::size_t i = iz * slab; i < (iz + 1) * slab; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) acc += V[j][i] * gz[3 * j + k][i] * vp.comp[k][i];
    return acc;
  });
  return parts;
}

double Operators::equilibrium_residual() const {
  if (!background_.active) return 0.0;
  SpectralField3 visc = spectral::negative_laplacian(space_, background_.spectral);
  const double scale_ref = spectral::l2_norm(space_, visc);
  // (V . grad) V, projected and dealiased exactly as in the operators.
  RealField3 adv(space_.N());
  const auto& V = background_.velocity.comp;
  const auto& gV = background_.velocity_gradient;
  const std::size_t total = space_.grid().real_size();
  for (std::size_t i = 0; i < total; ++i)
    for (int k = 0; k < 3; ++k) {
      double s = 0.0;
      for (int j = 0; j < 3; ++j) s += V[j][i] * gV[3 * j + k][i];
      adv.comp[k][i] = s;
    }
  SpectralField3 a = spectral::transform_forward(space_, adv);
  spectral::dealias(space_, a);
  spectral::leray_project_inplace(space_, a);
  const SpectralField3 F = spectral::transform_forward(space_, background_.compensating_force);
  add_scaled(visc, 1.0, a);
  add_scaled(visc, -1.0, F);
  return scale_ref > 0.0 ? spectral::l2_norm(space_, visc) / scale_ref : 0.0;
}

// --- time stepping ---------------------------------------------------------

void apply_heat(const SpectralSpace& space, SpectralField3& f, double h) {
  const int n = space.N(), nh = space.nh();
#pragma omp parallel for schedule(static)
  for (int ikz = 0; ikz < n; ++ikz)
    for (int iky = 0; iky < n; ++iky)
      for (int ikx = 0; ikx < nh; ++ikx) {
        const std::size_t i = space.cindex(ikx, iky, ikz);
        const Vec3 k = space.wavevector(ikx, iky, ikz);
        const double e = std::exp(-dot(k, k) * h);
        for (auto& c : f.comp) c[i] *= e;
      }
}

Stepper::Stepper(const Operators& ops, Mode mode, double dt) : ops_(ops), mode_(mode), dt_(dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const double limit = cfl_limit(0.0);
  if (dt_ > limit)
    throw CflError(fmt::format("dt = {} exceeds the advective limit {} set by the background", dt_, limit));
  const SpectralSpace& sp = ops_.space();
  const std::size_t total = sp.grid().complex_size();
  e_full_.resize(total);
  e_half_.resize(total);
  e_back_.resize(total);
  std::size_t i = 0;
  for (int ikz = 0; ikz < sp.N(); ++ikz)
    for (int iky = 0; iky < sp.N(); ++iky)
      for (int ikx = 0; ikx < sp.nh(); ++ikx, ++i) {
        const Vec3 k = sp.wavevector(ikx, iky, ikz);
        const double k2 = dot(k, k);
        e_full_[i] = std::exp(-k2 * dt_);
        e_half_[i] = std::exp(-0.5 * k2 * dt_);
        e_back_[i] = std::exp(0.5 * k2 * dt_);
      }
}

void Stepper::heat(SpectralField3& f, const std::vector<double>& factor) const {
  const std::size_t n = factor.size();
  for (auto& c : f.comp) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) c[i] *= factor[i];
  }
}

double Stepper::cfl_limit(double max_w) const {
  const double speed = ops_.background().max_speed + max_w;
  return speed > 0.0 ? 0.5 * ops_.space().grid().h() / speed : std::numeric_limits<double>::infinity();
}

SpectralField3 Stepper::rhs(const SpectralField3& w, Mode mode) const {
  SpectralField3 g;
  switch (mode) {
    case Mode::nonlinear: {
      double max_w = 0.0;
      g = ops_.perturbation_advection(w, &max_w);
      const double limit = cfl_limit(max_w);
      if (dt_ > limit)
        throw CflError(fmt::format("dt = {} exceeds the advective limit {} (max |w| = {})", dt_,
                                   limit, max_w));
      break;
    }
    case Mode::linear_L: g = ops_.coupling(w); break;
    case Mode::linear_Lstar: g = ops_.coupling_adjoint(w); break;
  }
  scale(g, -1.0);
  return g;
}

void Stepper::forward_step(State& s) const {
  const double dt = dt_;
  const SpectralField3& u = s.w;

  SpectralField3 u1 = u;
  add_scaled(u1, dt, rhs(u, mode_));
  heat(u1, e_full_);

  SpectralField3 t1 = u1;
  add_scaled(t1, dt, rhs(u1, mode_));
  heat(t1, e_back_);
  SpectralField3 u2 = u;
  heat(u2, e_half_);
  scale(u2, 0.75);
  add_scaled(u2, 0.25, t1);

  SpectralField3 t2 = u2;
  add_scaled(t2, dt, rhs(u2, mode_));
  heat(t2, e_half_);
  SpectralField3 u3 = u;
  heat(u3, e_full_);
  scale(u3, 1.0 / 3.0);
  add_scaled(u3, 2.0 / 3.0, t2);
  s.w = std::move(u3);
}

// Transpose of forward_step for the linear_L map, with B replaced by B*.
void Stepper::transpose_step(State& s) const {
  const double dt = dt_;
  const SpectralField3& b = s.w;
  auto plus_dt_rhs = [&](SpectralField3& x) { add_scaled(x, dt, rhs(x, Mode::linear_Lstar)); };

  SpectralField3 y = b;
  heat(y, e_half_);
  plus_dt_rhs(y);
  scale(y, 2.0 / 3.0);

  SpectralField3 out = b;
  heat(out, e_full_);
  scale(out, 1.0 / 3.0);
  SpectralField3 half = y;
  heat(half, e_half_);
  add_scaled(out, 0.75, half);

  SpectralField3 tmp = std::move(y);
  heat(tmp, e_back_);
  plus_dt_rhs(tmp);
  heat(tmp, e_full_);
  plus_dt_rhs(tmp);
  add_scaled(out, 0.25, tmp);
  s.w = std::move(out);
}

void Stepper::step(State& s) const {
  if (mode_ == Mode::linear_Lstar)
    transpose_step(s);
  else
    forward_step(s);
  mark_solenoidal(s.w);
  ++s.step;
  s.t = s.step * dt_;
  const double e = spectral::inner_product(ops_.space(), s.w, s.w);
  if (!std::isfinite(e))
    throw BlowUpError(fmt::format("non-finite energy at step {} (t = {})", s.step, s.t));
}

// --- diagnostics -----------------------------------------------------------

void DiagnosticSeries::write_csv(std::ostream& out) const {
  out << "t,E,D,X,cumD,rho,L4,Lp\n";
  for (const auto& s : samples)
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", s.t,
                       s.E, s.D, s.X, s.cumD, s.rho, s.L4, s.Lp);
}

// --- initial data ----------------------------------------------------------

namespace {

SpectralField3 finish_initial(const SpectralSpace& space, SpectralField3 f, double amplitude) {
  spectral::leray_project_inplace(space, f);
  spectral::dealias(space, f);
  const double norm = spectral::l2_norm(space, f);
  if (norm > 0.0) scale(f, amplitude / norm);
  return f;
}

SpectralField3 shaped_noise(const SpectralSpace& space, std::uint64_t seed,
                            const std::function<double(double)>& amplitude_of_k) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  RealField3 noise(space.N());
  for (auto& c : noise.comp)
    for (auto& v : c) v = normal(rng);
  SpectralField3 f = spectral::transform_forward(space, noise);
  const int n = space.N(), nh = space.nh();
  for (int ikz = 0; ikz < n; ++ikz)
    for (int iky = 0; iky < n; ++iky)
      for (int ikx = 0; ikx < nh; ++ikx) {
        const std::size_t i = space.cindex(ikx, iky, ikz);
        const double k = norm(space.wavevector(ikx, iky, ikz));
        const double a = k > 0.0 ? amplitude_of_k(k) : 0.0;
        for (auto& c : f.comp) c[i] *= a;
      }
  return f;
}

SpectralField3 radial_envelope(const SpectralSpace& space, const std::function<double(double)>& env) {
  const GridSpec& g = space.grid();
  RealField3 f(g.N);
  for (int iz = 0; iz < g.N; ++iz)
    for (int iy = 0; iy < g.N; ++iy)
      for (int ix = 0; ix < g.N; ++ix) {
        const double x = g.node(ix), y = g.node(iy), z = g.node(iz);
        f.comp[1][f.index(ix, iy, iz)] = env(x * x + y * y + z * z);
      }
  return spectral::transform_forward(space, f);
}

}  // namespace

SpectralField3 make_initial(const SpectralSpace& space, const InitialData& spec) {
  switch (spec.kind) {
    case InitialKind::zero: {
      SpectralField3 f(space.N());
      mark_solenoidal(f);
      return f;
    }
    case InitialKind::random_lowpass: {
      // Shell spectrum k^4 exp(-(k/k0)^2) means per-mode amplitude k exp(-k^2 / (2 k0^2)).
      const double k0 = spec.k0;
      return finish_initial(space,
                            shaped_noise(space, spec.seed,
                                         [k0](double k) { return k * std::exp(-k * k / (2 * k0 * k0)); }),
                            spec.amplitude);
    }
    case InitialKind::rough: {
      const double slope = spec.rough_slope;
      return finish_initial(
          space, shaped_noise(space, spec.seed, [slope](double k) { return std::pow(k, -slope); }),
          spec.amplitude);
    }
    case InitialKind::gaussian_bump: {
      const double w2 = spec.width * spec.width;
      return finish_initial(space, radial_envelope(space, [w2](double r2) { return std::exp(-r2 / w2); }),
                            spec.amplitude);
    }
    case InitialKind::lp_bump: {
      const double w2 = spec.width * spec.width;
      const double e = -1.5 / spec.bump_p;
      return finish_initial(
          space, radial_envelope(space, [w2, e](double r2) { return std::pow(1.0 + r2 / w2, e); }),
          spec.amplitude);
    }
    case InitialKind::snapshot: {
      auto [header, field] = spectral::read_snapshot(spec.snapshot_path);
      if (field.N != space.N())
        throw ConfigError(fmt::format("snapshot {} has N = {}, grid has N = {}",
                                      spec.snapshot_path.string(), field.N, space.N()));
      SpectralField3 f = spectral::transform_forward(space, field);
      spectral::leray_project_inplace(space, f);
      spectral::dealias(space, f);
      return f;
    }
  }
  throw std::logic_error("unhandled initial data kind");
}

// --- runs ------------------------------------------------------------------

Simulation::Simulation(const SimConfig& cfg)
    : config(cfg),
      params(cfg.c),
      space(cfg.grid),
      background(cfg.background ? spectral::build_background(params, space)
                                : spectral::zero_background(space)),
      ops(space, background) {}

namespace {

Sample measure(const Simulation& sim, const State& s, double p) {
  const auto rec = spectral::norms(sim.space, s.w, &sim.background, p);
  Sample out;
  out.t = s.t;
  out.E = rec.l2 * rec.l2;
  out.D = rec.h1 * rec.h1;
  out.X = rec.cross;
  out.L4 = rec.l4;
  out.Lp = rec.lp;
  return out;
}

}  // namespace

DiagnosticSeries run(Simulation& sim, const SnapshotSink& snapshots) {
  const SimConfig& cfg = sim.config;
  DiagnosticSeries series;
  series.norm_p = cfg.norm_p;
  series.K = cfg.background ? hardy::coupling_constant(sim.params) : 0.0;
  series.coercive = series.K < 1.0;

  State state;
  state.w = make_initial(sim.space, cfg.initial);
  const long n_steps = cfg.steps();
  double cumD = 0.0;
  double D_prev = spectral::gradient_inner_product(sim.space, state.w, state.w);

  auto record = [&]() {
    Sample smp = measure(sim, state, cfg.norm_p);
    smp.cumD = cumD;
    double rho = 0.0;
    bool first = true;
    for (const auto& prev : series.samples) {
      const double r = smp.E + 2.0 * (1.0 - series.K) * (smp.cumD - prev.cumD) - prev.E;
      rho = first ? r : std::max(rho, r);
      first = false;
    }
    smp.rho = rho;
    series.samples.push_back(smp);
  };

  try {
    const Stepper stepper(sim.ops, cfg.mode, cfg.dt);
    record();
    if (snapshots && cfg.snapshot_interval > 0) snapshots(state);
    while (state.step < n_steps) {
      stepper.step(state);
      const double D = spectral::gradient_inner_product(sim.space, state.w, state.w);
      cumD += 0.5 * cfg.dt * (D + D_prev);
      D_prev = D;
      if (state.step % cfg.diagnostic_interval == 0 || state.step == n_steps) record();
      if (snapshots && cfg.snapshot_interval > 0 && state.step % cfg.snapshot_interval == 0)
        snapshots(state);
    }
  } catch (const Error& e) {
    series.error = e.what();
  }
  return series;
}

DiagnosticSeries run(const SimConfig& config, const SnapshotSink& snapshots) {
  Simulation sim(config);
  return run(sim, snapshots);
}

std::vector<ProbeRecord> semigroup_probe(const Simulation& sim, const SpectralField3& z0,
                                         const std::vector<double>& probe_times) {
  std::vector<long> targets;
  for (double t : probe_times) targets.push_back(std::lround(t / sim.config.dt));
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  const Stepper stepper(sim.ops, Mode::linear_L, sim.config.dt);
  State s;
  s.w = z0;
  std::vector<ProbeRecord> out;
  for (long target : targets) {
    while (s.step < target) stepper.step(s);
    ProbeRecord r;
    r.t = s.t;
    r.norm = spectral::l2_norm(sim.space, s.w);
    r.grad_norm = spectral::h1_seminorm(sim.space, s.w);
    r.L_norm = spectral::l2_norm(sim.space, sim.ops.apply_L(s.w));
    r.a_energy = sim.ops.form_aL(s.w, s.w).total();
    out.push_back(r);
  }
  return out;
}

HypercontractivityResult hypercontractivity_probe(const Simulation& sim, double p,
                                                  const SpectralField3& z0, double t_min,
                                                  double t_max, int n_samples) {
  if (!(t_min > 0.0 && t_min < t_max) || n_samples < fit::kMinFitPoints)
    throw std::invalid_argument("hypercontractivity window or sample count is degenerate");
  HypercontractivityResult res;
  res.p = p;
  res.target_exponent = -1.5 * (1.0 / p - 0.5);
  res.z0_lp = spectral::grid_lp_norm(sim.space, spectral::transform_inverse(sim.space, z0), p);

  std::vector<long> targets;
  const double ratio = std::pow(t_max / t_min, 1.0 / (n_samples - 1));
  for (int i = 0; i < n_samples; ++i)
    targets.push_back(std::max(1L, std::lround(t_min * std::pow(ratio, i) / sim.config.dt)));
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  const Stepper stepper(sim.ops, Mode::linear_L, sim.config.dt);
  State s;
  s.w = z0;
  for (long target : targets) {
    while (s.step < target) stepper.step(s);
    res.t.push_back(s.t);
    res.norm.push_back(spectral::l2_norm(sim.space, s.w));
  }
  res.fit = fit::fit_power_law(res.t, res.norm, res.t.front(), res.t.back());
  return res;
}

}  // namespace landau::dynamics
