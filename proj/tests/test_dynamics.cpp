#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "landau/dynamics.hpp"
#include "landau/hardy_constants.hpp"

using namespace landau;
using namespace landau::dynamics;
using spectral::RealField3;

namespace {

SimConfig config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

std::string error_of(const std::string& text) {
  try {
    config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

SpectralField3 subtract(const SpectralField3& a, const SpectralField3& b) {
  SpectralField3 d(a.N);
  for (int k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < a.comp[k].size(); ++i) d.comp[k][i] = a.comp[k][i] - b.comp[k][i];
  return d;
}

// u = (sin z + cos y, sin x + cos z, sin y + cos x) in a box of half-width pi:
// curl u = u, so the advection term is a pure gradient.
SpectralField3 beltrami(const SpectralSpace& space) {
  const auto& g = space.grid();
  const int N = g.N;
  RealField3 f(N);
  for (int iz = 0; iz < N; ++iz)
    for (int iy = 0; iy < N; ++iy)
      for (int ix = 0; ix < N; ++ix) {
        const double x = g.node(ix), y = g.node(iy), z = g.node(iz);
        const std::size_t i = f.index(ix, iy, iz);
        f.comp[0][i] = std::sin(z) + std::cos(y);
        f.comp[1][i] = std::sin(x) + std::cos(z);
        f.comp[2][i] = std::sin(y) + std::cos(x);
      }
  auto F = spectral::transform_forward(space, f);
  spectral::leray_project_inplace(space, F);
  spectral::dealias(space, F);
  return F;
}

SpectralField3 evolve(const Simulation& sim, Mode mode, double dt, long steps, SpectralField3 w) {
  const Stepper stepper(sim.ops, mode, dt);
  State s{0.0, 0, std::move(w)};
  for (long i = 0; i < steps; ++i) stepper.step(s);
  return s.w;
}

const std::string kSmall = "N = 32\nL_box = 6.283185307179586\n";

}  // namespace

TEST_CASE("config parsing") {
  const SimConfig c = config("# comment\nc = 3\nN = 32\nL_box = 2\n\ndt = 0.005  # trailing\nT_end = 0.1\nmode = linear_L\n"
                             "initial = rough\nseed = 9\n");
  CHECK(c.c == 3.0);
  CHECK(c.grid.N == 32);
  CHECK(c.grid.R_cut == doctest::Approx(1.6));
  CHECK(c.grid.eps_core == doctest::Approx(0.1));
  CHECK(c.steps() == 20);
  CHECK(c.mode == Mode::linear_L);
  CHECK(c.initial.kind == InitialKind::rough);
  CHECK(c.initial.seed == 9);

  const SimConfig d = config("c_over_c0 = 2\n");
  CHECK(d.c == doctest::Approx(2.0 * hardy::threshold_c0()));
  CHECK(d.grid.N == 64);

  std::ostringstream out;
  write_config(out, c);
  std::ostringstream again;
  write_config(again, config(out.str()));
  CHECK(out.str() == again.str());
}

TEST_CASE("config errors carry the line number") {
  CHECK(error_of("c = 2\nN = 32\nbogus = 1\n").find("test.cfg:3:") == 0);
  CHECK(error_of("c = 2\nc = 3\n").find("test.cfg:2:") == 0);
  CHECK(error_of("N = 32\ndt = fast\n").find("test.cfg:2:") == 0);
  CHECK(error_of("mode = sideways\n").find("test.cfg:1:") == 0);
  CHECK(error_of("just words\n").find("test.cfg:1:") == 0);
  CHECK(error_of("c = 2\nc_over_c0 = 2\n") != "");
  CHECK(error_of("c = 0.5\n") != "");
  CHECK(error_of("N = 24\n") != "");
  CHECK(error_of("dt = -1\n") != "");
  CHECK(error_of("initial = snapshot\n") != "");
  CHECK_THROWS_AS(load_config("/nonexistent/run.cfg"), ConfigError);
  CHECK(parse_mode(to_string(Mode::linear_Lstar)) == Mode::linear_Lstar);
  CHECK(parse_initial_kind(to_string(InitialKind::lp_bump)) == InitialKind::lp_bump);
}

TEST_CASE("initial data") {
  Simulation sim(config(kSmall + "c = 3\n"));
  for (auto kind : {InitialKind::random_lowpass, InitialKind::rough, InitialKind::gaussian_bump, InitialKind::lp_bump}) {
    InitialData spec;
    spec.kind = kind;
    spec.amplitude = 0.3;
    const SpectralField3 w = make_initial(sim.space, spec);
    CHECK(spectral::l2_norm(sim.space, w) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(spectral::max_relative_divergence(sim.space, w) <= 1e-12);
    CHECK(spectral::is_dealiased(sim.space, w));
    CHECK(w.divergence_free);
  }
  InitialData a, b;
  b.seed = 2;
  const auto wa = make_initial(sim.space, a);
  CHECK(spectral::l2_norm(sim.space, subtract(wa, make_initial(sim.space, a))) == 0.0);
  CHECK(spectral::l2_norm(sim.space, subtract(wa, make_initial(sim.space, b))) > 0.1);
  InitialData z;
  z.kind = InitialKind::zero;
  CHECK(spectral::l2_norm(sim.space, make_initial(sim.space, z)) == 0.0);
}

TEST_CASE("operator duality and the bilinear form") {
  Simulation sim(config(kSmall + "c = 3\n"));
  InitialData sa, sb;
  sb.seed = 5;
  sb.k0 = 3;
  const auto z = make_initial(sim.space, sa), v = make_initial(sim.space, sb);
  const double lhs = spectral::inner_product(sim.space, sim.ops.apply_L(z), v);
  const double rhs = spectral::inner_product(sim.space, z, sim.ops.apply_Lstar(v));
  CHECK(std::abs(lhs - rhs) <= 1e-12);
  const auto form = sim.ops.form_aL(z, z);
  CHECK(form.total() == doctest::Approx(spectral::inner_product(sim.space, sim.ops.apply_L(z), z)).epsilon(1e-12));
  CHECK(std::abs(form.transport) <= 1e-12 * form.dirichlet);
  CHECK(form.dirichlet == doctest::Approx(std::pow(spectral::h1_seminorm(sim.space, z), 2)).epsilon(1e-12));
  CHECK(spectral::max_relative_divergence(sim.space, sim.ops.apply_L(z)) <= 1e-12);
  CHECK(spectral::is_dealiased(sim.space, sim.ops.apply_Lstar(z)));
  // P[(w . grad) w] is orthogonal to w
  CHECK(std::abs(spectral::inner_product(sim.space, sim.ops.nonlinear(z), z)) <= 1e-13);
}

TEST_CASE("coercivity above the threshold") {
  Simulation sim(config(kSmall + "c_over_c0 = 2\n"));
  const double K = hardy::coupling_constant(sim.params);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    InitialData spec;
    spec.seed = seed;
    spec.kind = seed % 2 ? InitialKind::rough : InitialKind::random_lowpass;
    const auto z = make_initial(sim.space, spec);
    const double a = sim.ops.form_aL(z, z).total();
    CHECK(a >= (1.0 - K) * std::pow(spectral::h1_seminorm(sim.space, z), 2));
  }
}

TEST_CASE("heat flow of a single mode is exact") {
  Simulation sim(config(kSmall + "background = false\n"));
  const auto& space = sim.space;
  SpectralField3 w(32);
  w.comp[1][space.cindex(2, 0, 0)] = {0.0, -0.5};
  w.divergence_free = w.zero_mean = true;
  const double k2 = std::pow(2 * space.grid().k_unit(), 2);
  const double dt = 0.05;
  const auto out = evolve(sim, Mode::linear_L, dt, 10, w);
  CHECK(spectral::l2_norm(space, out) ==
        doctest::Approx(std::exp(-k2 * 10 * dt) * spectral::l2_norm(space, w)).epsilon(1e-13));
}

TEST_CASE("Beltrami flow decays like the heat equation under the nonlinear step") {
  Simulation sim(config("N = 32\nL_box = 3.141592653589793\nbackground = false\n"));
  const auto w0 = beltrami(sim.space);
  const auto w = evolve(sim, Mode::nonlinear, 0.01, 50, w0);
  CHECK(spectral::l2_norm(sim.space, w) ==
        doctest::Approx(std::exp(-0.5) * spectral::l2_norm(sim.space, w0)).epsilon(1e-12));
}

TEST_CASE("third-order convergence in time") {
  Simulation sim(config(kSmall + "c = 3\n"));
  InitialData spec;
  spec.amplitude = 2.0;
  const auto w0 = make_initial(sim.space, spec);
  const double T = 0.2;
  const auto ref = evolve(sim, Mode::nonlinear, T / 64, 64, w0);
  std::vector<double> err;
  for (int n : {4, 8, 16}) err.push_back(spectral::l2_norm(sim.space, subtract(evolve(sim, Mode::nonlinear, T / n, n, w0), ref)));
  const double o1 = std::log2(err[0] / err[1]), o2 = std::log2(err[1] / err[2]);
  MESSAGE("orders " << o1 << " " << o2);
  CHECK(o1 > 2.6);
  CHECK(o2 > 2.6);
}

TEST_CASE("linear propagators are adjoint") {
  Simulation sim(config(kSmall + "c = 3\n"));
  InitialData sa, sb;
  sb.seed = 8;
  sb.kind = InitialKind::rough;
  const auto a = make_initial(sim.space, sa), b = make_initial(sim.space, sb);
  const auto ea = evolve(sim, Mode::linear_L, 0.02, 25, a);
  const auto eb = evolve(sim, Mode::linear_Lstar, 0.02, 25, b);
  CHECK(std::abs(spectral::inner_product(sim.space, ea, b) - spectral::inner_product(sim.space, a, eb)) <= 1e-14);
}

TEST_CASE("zero perturbation is an equilibrium") {
  Simulation sim(config(kSmall + "c = 3\ninitial = zero\n"));
  CHECK(sim.ops.equilibrium_residual() <= 1e-12);
  SpectralField3 w(32);
  w.divergence_free = w.zero_mean = true;
  CHECK(spectral::l2_norm(sim.space, evolve(sim, Mode::nonlinear, 0.01, 20, w)) <= 1e-12);
}

TEST_CASE("energy identity") {
  // dE/dt = -2 D - 2 X for the perturbation equation; the trapezoid error is O(dt^2)
  Simulation sim(config(kSmall + "c = 3\n"));
  InitialData spec;
  spec.amplitude = 0.5;
  const double dt = 0.001;
  const Stepper stepper(sim.ops, Mode::nonlinear, dt);
  State s{0.0, 0, make_initial(sim.space, spec)};
  auto rate = [&](const SpectralField3& w) {
    const auto n = spectral::norms(sim.space, w, &sim.background);
    return n.h1 * n.h1 + n.cross;
  };
  const double E0 = std::pow(spectral::l2_norm(sim.space, s.w), 2);
  double integral = 0.0, prev = rate(s.w);
  for (int i = 0; i < 100; ++i) {
    stepper.step(s);
    const double r = rate(s.w);
    integral += 0.5 * dt * (prev + r);
    prev = r;
  }
  const double E1 = std::pow(spectral::l2_norm(sim.space, s.w), 2);
  CHECK(std::abs(E1 - E0 + 2 * integral) <= 1e-4 * E0);
  CHECK(E1 < E0);
}

TEST_CASE("time step guards") {
  Simulation sim(config(kSmall + "c = 3\n"));
  CHECK_THROWS_AS(Stepper(sim.ops, Mode::nonlinear, 10.0), CflError);
  const Stepper ok(sim.ops, Mode::nonlinear, 0.01);
  CHECK(ok.cfl_limit(0.0) > 0.01);

  // a large perturbation violates the CFL bound during the run
  const auto series = run(config(kSmall + "c = 3\namplitude = 1e4\nT_end = 0.1\n"));
  CHECK(series.error.find("advective limit") != std::string::npos);
}

TEST_CASE("diagnostic series") {
  const auto series = run(config(kSmall + "c_over_c0 = 2\nT_end = 0.5\ndiagnostic_interval = 5\n"));
  REQUIRE(series.error.empty());
  CHECK(series.samples.size() == 11);
  CHECK(series.coercive);
  CHECK(series.K < 1.0);
  const double E0 = series.samples.front().E;
  for (std::size_t i = 1; i < series.samples.size(); ++i) {
    CHECK(series.samples[i].E <= series.samples[i - 1].E);
    CHECK(series.samples[i].rho <= 1e-6 * E0);
    CHECK(series.samples[i].cumD > series.samples[i - 1].cumD);
  }
  CHECK(series.samples.back().t == doctest::Approx(0.5));
  std::ostringstream out;
  series.write_csv(out);
  CHECK(out.str().rfind("t,E,D,X,cumD,rho,L4,Lp\n", 0) == 0);
}

TEST_CASE("semigroup probe") {
  Simulation sim(config(kSmall + "c_over_c0 = 2\n"));
  InitialData spec;
  spec.kind = InitialKind::rough;
  const auto z0 = make_initial(sim.space, spec);
  const auto rec = semigroup_probe(sim, z0, {0.0, 0.1, 0.2, 0.5, 1.0});
  REQUIRE(rec.size() == 5);
  CHECK(rec[0].norm == doctest::Approx(1.0));
  for (std::size_t i = 1; i < rec.size(); ++i) {
    CHECK(rec[i].norm < rec[i - 1].norm);
    CHECK(rec[i].a_energy > 0.0);
  }
}

TEST_CASE("linear energy identity and the square-root bound") {
  Simulation sim(config(kSmall + "c_over_c0 = 2\n"));
  const double K = hardy::coupling_constant(sim.params);
  InitialData spec;
  spec.kind = InitialKind::rough;
  auto gap = [&](double dt) {
    // one step: E(dt) - E(0) against -2 int a(z, z) by Simpson's rule on half steps
    const Stepper half(sim.ops, Mode::linear_L, dt / 2);
    State s{0.0, 0, make_initial(sim.space, spec)};
    const double E0 = std::pow(spectral::l2_norm(sim.space, s.w), 2);
    double a[3];
    for (int i = 0; i < 3; ++i) {
      a[i] = sim.ops.form_aL(s.w, s.w).total();
      CHECK(spectral::h1_seminorm(sim.space, s.w) <= std::sqrt(a[i] / (1.0 - K)));
      if (i < 2) half.step(s);
    }
    const double E1 = std::pow(spectral::l2_norm(sim.space, s.w), 2);
    return std::abs(E1 - E0 + 2 * dt / 6 * (a[0] + 4 * a[1] + a[2]));
  };
  const double g1 = gap(0.004), g2 = gap(0.002);
  MESSAGE("per-step gaps " << g1 << " " << g2);
  CHECK(std::log2(g1 / g2) > 2.5);
}

TEST_CASE("hypercontractivity targets") {
  Simulation sim(config(kSmall + "c_over_c0 = 2\nmode = linear_L\ndt = 0.02\n"));
  InitialData spec;
  spec.kind = InitialKind::lp_bump;
  const auto z0 = make_initial(sim.space, spec);
  CHECK(hypercontractivity_probe(sim, 1.5, z0, 0.1, 0.5, 8).target_exponent == doctest::Approx(-0.25));
  CHECK(hypercontractivity_probe(sim, 4.0 / 3.0, z0, 0.1, 0.5, 8).target_exponent == doctest::Approx(-0.375));
  const auto r = hypercontractivity_probe(sim, 2.0, z0, 0.1, 0.5, 8);
  CHECK(r.target_exponent == 0.0);
  CHECK(r.fit.exponent < 0.0);
  CHECK(r.z0_lp > 0.0);
  CHECK_THROWS_AS(hypercontractivity_probe(sim, 1.5, z0, 0.5, 0.1), std::invalid_argument);
}
