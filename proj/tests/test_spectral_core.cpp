#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "landau/landau_field.hpp"
#include "landau/spectral_core.hpp"

using namespace landau;
using namespace landau::spectral;

namespace {

constexpr double kL = 2 * std::numbers::pi;

GridSpec grid(int N, double L = kL) { return make_grid(N, L, 0.8 * L, 0.05 * L); }

RealField3 random_real(int N, unsigned seed) {
  RealField3 f(N);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  for (auto& c : f.comp)
    for (auto& v : c) v = n(rng);
  return f;
}

double max_diff(const RealField3& a, const RealField3& b) {
  double m = 0.0;
  for (int k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < a.comp[k].size(); ++i) m = std::max(m, std::abs(a.comp[k][i] - b.comp[k][i]));
  return m;
}

double max_abs(const SpectralField3& f) {
  double m = 0.0;
  for (const auto& c : f.comp)
    for (const auto& v : c) m = std::max(m, std::abs(v));
  return m;
}

SpectralField3 difference(const SpectralField3& a, const SpectralField3& b) {
  SpectralField3 d(a.N);
  for (int k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < a.comp[k].size(); ++i) d.comp[k][i] = a.comp[k][i] - b.comp[k][i];
  return d;
}

}  // namespace

TEST_CASE("grid construction") {
  const GridSpec g = grid(64);
  CHECK(g.h() == doctest::Approx(2 * kL / 64));
  CHECK(g.k_unit() == doctest::Approx(0.5));
  double rmin = INFINITY;
  for (int i = 0; i < 64; ++i) rmin = std::min(rmin, std::abs(g.node(i)));
  CHECK(rmin == doctest::Approx(0.5 * g.h()));
  CHECK_THROWS_AS(make_grid(17, kL, 0.8 * kL, 0.05 * kL), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(8, kL, 0.8 * kL, 0.05 * kL), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(64, kL, kL, 0.05 * kL), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(64, kL, 0.8 * kL, 0.9 * kL), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(64, kL, 0.8 * kL, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(64, -1.0, 0.8, 0.05), std::invalid_argument);
}

TEST_CASE("round trip and Parseval") {
  SpectralSpace space(grid(32));
  const RealField3 f = random_real(32, 3);
  const SpectralField3 F = transform_forward(space, f);
  const RealField3 back = transform_inverse(space, F);
  double scale = 0.0;
  for (const auto& c : f.comp)
    for (double v : c) scale = std::max(scale, std::abs(v));
  CHECK(max_diff(f, back) <= 1e-13 * scale);

  const double direct = grid_l2_norm(space, f);
  CHECK(std::abs(l2_norm(space, F) - direct) <= 1e-12 * direct);
  // an independent summation in long double
  long double s = 0;
  for (const auto& c : f.comp)
    for (double v : c) s += static_cast<long double>(v) * v;
  const double h = space.grid().h();
  CHECK(std::abs(static_cast<double>(std::sqrt(s * h * h * h)) - direct) <= 1e-12 * direct);
}

TEST_CASE("single mode has one coefficient") {
  SpectralSpace space(grid(32));
  const GridSpec& g = space.grid();
  const double a = 0.7, k = 3 * g.k_unit();
  RealField3 f(32);
  for (int iz = 0; iz < 32; ++iz)
    for (int iy = 0; iy < 32; ++iy)
      for (int ix = 0; ix < 32; ++ix) f.comp[1][f.index(ix, iy, iz)] = a * std::sin(k * (g.node(ix) - g.node(0)));
  const SpectralField3 F = transform_forward(space, f);
  const std::size_t at = space.cindex(3, 0, 0);
  CHECK(std::abs(F.comp[1][at] - Complex(0.0, -a / 2)) <= 1e-15);
  double rest = 0.0;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < F.comp[c].size(); ++i)
      if (!(c == 1 && i == at)) rest = std::max(rest, std::abs(F.comp[c][i]));
  CHECK(rest <= 1e-15);

  // norm conventions
  const double l2 = a * std::pow(2 * g.L_box, 1.5) / std::sqrt(2.0);
  CHECK(l2_norm(space, F) == doctest::Approx(l2).epsilon(1e-14));
  CHECK(grid_l2_norm(space, f) == doctest::Approx(l2).epsilon(1e-14));
  CHECK(h1_seminorm(space, F) == doctest::Approx(k * l2).epsilon(1e-14));
  const SpectralField3 lap = negative_laplacian(space, F);
  CHECK(std::abs(lap.comp[1][at] - k * k * F.comp[1][at]) <= 1e-15);

  const GradientSamples grad = physical_gradient(space, F);
  double err = 0.0;
  for (int ix = 0; ix < 32; ++ix) {
    const double exact = a * k * std::cos(k * (g.node(ix) - g.node(0)));
    err = std::max(err, std::abs(grad[3 * 0 + 1][f.index(ix, 5, 7)] - exact));
  }
  CHECK(err <= 1e-13);
}

TEST_CASE("Leray projection") {
  SpectralSpace space(grid(32));
  SpectralField3 F = transform_forward(space, random_real(32, 11));
  const SpectralField3 G = transform_forward(space, random_real(32, 12));
  const SpectralField3 P = leray_project(space, F);
  CHECK(P.divergence_free);
  CHECK(P.zero_mean);
  CHECK(max_relative_divergence(space, P) <= 1e-12);
  const double scale = max_abs(P);
  CHECK(max_abs(difference(leray_project(space, P), P)) <= 1e-14 * scale);
  const double lhs = inner_product(space, P, G), rhs = inner_product(space, F, leray_project(space, G));
  CHECK(std::abs(lhs - rhs) <= 1e-12 * l2_norm(space, F) * l2_norm(space, G));
  for (int c = 0; c < 3; ++c) CHECK(P.comp[c][0] == Complex(0.0));

  // gradients are annihilated
  const int N = 32, nh = space.nh();
  SpectralField3 grad(N);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  for (int ikz = 0; ikz < N; ++ikz)
    for (int iky = 0; iky < N; ++iky)
      for (int ikx = 0; ikx < nh; ++ikx) {
        const Vec3 k = space.wavevector(ikx, iky, ikz);
        const Complex phi(n(rng), n(rng));
        for (int c = 0; c < 3; ++c) grad.comp[c][space.cindex(ikx, iky, ikz)] = Complex(0.0, k[c]) * phi;
      }
  CHECK(max_abs(leray_project(space, grad)) <= 1e-12 * max_abs(grad));
}

TEST_CASE("dealiasing") {
  SpectralSpace space(grid(32));
  SpectralField3 F = transform_forward(space, random_real(32, 5));
  CHECK_FALSE(is_dealiased(space, F));
  dealias(space, F);
  CHECK(is_dealiased(space, F));
  const int K = space.grid().dealias_max();
  CHECK(K == 10);
  CHECK(space.retained(K, 0, 0));
  CHECK_FALSE(space.retained(K + 1, 0, 0));
  CHECK(F.comp[0][space.cindex(K + 1, 0, 0)] == Complex(0.0));
  CHECK(F.comp[0][space.cindex(K, 0, 0)] != Complex(0.0));
  CHECK(F.comp[2][space.cindex(0, 32 - K - 1, 0)] == Complex(0.0));
}

TEST_CASE("Lp norms") {
  SpectralSpace space(grid(16));
  RealField3 f(16);
  for (auto& v : f.comp[0]) v = 3.0;
  for (auto& v : f.comp[2]) v = 4.0;
  const double V = space.grid().volume();
  CHECK(grid_lp_norm(space, f, 4.0) == doctest::Approx(5.0 * std::pow(V, 0.25)).epsilon(1e-14));
  CHECK(grid_lp_norm(space, f, 1.5) == doctest::Approx(5.0 * std::pow(V, 1 / 1.5)).epsilon(1e-14));
}

TEST_CASE("Gagliardo-Nirenberg ratio is bounded over a field suite") {
  SpectralSpace space(grid(32));
  std::vector<double> ratios;
  for (unsigned seed = 1; seed <= 8; ++seed) {
    SpectralField3 F = transform_forward(space, random_real(32, seed));
    // damp high modes by a seed-dependent amount
    const double kc = 0.5 * seed;
    for (int ikz = 0; ikz < 32; ++ikz)
      for (int iky = 0; iky < 32; ++iky)
        for (int ikx = 0; ikx < space.nh(); ++ikx) {
          const Vec3 k = space.wavevector(ikx, iky, ikz);
          const double damp = std::exp(-dot(k, k) / (kc * kc));
          for (auto& c : F.comp) c[space.cindex(ikx, iky, ikz)] *= damp;
        }
    leray_project_inplace(space, F);
    dealias(space, F);
    const NormRecord r = norms(space, F);
    ratios.push_back(r.l4 / (std::pow(r.h1, 0.75) * std::pow(r.l2, 0.25)));
  }
  const double C = *std::max_element(ratios.begin(), ratios.end());
  for (double r : ratios) {
    CHECK(r <= C);
    CHECK(r >= C / 10);
  }
}

TEST_CASE("cutoff profile") {
  const GridSpec g = grid(32);
  const double a = g.R_cut, b = g.background_end();
  CHECK(cutoff(g, 0.5 * a) == 1.0);
  CHECK(cutoff(g, a) == 1.0);
  CHECK(cutoff(g, b) == 0.0);
  CHECK(cutoff(g, b + 0.1) == 0.0);
  CHECK(cutoff(g, 0.5 * (a + b)) == doctest::Approx(0.5));
  for (double r : {a, b}) {
    CHECK(std::abs(cutoff_derivative(g, r)) <= 1e-12);
    CHECK(std::abs(cutoff_second_derivative(g, r)) <= 1e-12);
  }
  const double r = a + 0.3 * (b - a), h = 1e-5;
  CHECK(cutoff_derivative(g, r) == doctest::Approx((cutoff(g, r + h) - cutoff(g, r - h)) / (2 * h)).epsilon(1e-8));
  CHECK(cutoff_second_derivative(g, r) ==
        doctest::Approx((cutoff_derivative(g, r + h) - cutoff_derivative(g, r - h)) / (2 * h)).epsilon(1e-8));
}

TEST_CASE("background field") {
  const LandauParams p(3.0);
  SpectralSpace space(grid(32));
  const GridSpec& g = space.grid();
  const BackgroundField bg = build_background(p, space);
  CHECK(bg.active);
  CHECK(bg.spectral.divergence_free);
  CHECK(max_relative_divergence(space, bg.spectral) <= 1e-12);
  CHECK(is_dealiased(space, bg.spectral));
  CHECK(bg.max_pointwise_divergence <= 1e-10 * bg.max_speed);
  CHECK(bg.projection_defect < 0.25);

  double inside = 0.0, outside = 0.0;
  bool finite = true;
  const int N = g.N;
  for (int iz = 0; iz < N; ++iz)
    for (int iy = 0; iy < N; ++iy)
      for (int ix = 0; ix < N; ++ix) {
        const Vec3 x{g.node(ix), g.node(iy), g.node(iz)};
        const double r = norm(x);
        const std::size_t i = bg.samples.index(ix, iy, iz);
        const Vec3 s{bg.samples.comp[0][i], bg.samples.comp[1][i], bg.samples.comp[2][i]};
        if (r >= g.eps_core && r <= g.R_cut) inside = std::max(inside, norm(s - field::eval_velocity(p, x)));
        if (r >= g.background_end()) outside = std::max(outside, norm(s));
        for (int c = 0; c < 3; ++c) finite = finite && std::isfinite(bg.compensating_force.comp[c][i]);
      }
  CHECK(inside == 0.0);
  CHECK(outside == 0.0);
  CHECK(finite);

  const BackgroundField z = zero_background(space);
  CHECK_FALSE(z.active);
}

TEST_CASE("background energy converges under refinement") {
  const LandauParams p(3.0);
  SpectralSpace s64(grid(64)), s128(grid(128));
  const BackgroundField b64 = build_background(p, s64);
  // the core is resolved at N = 64 but not at N = 32
  CHECK(b64.cap_count > 0);
  CHECK(b64.projection_defect < 0.1);
  const double e64 = l2_norm(s64, b64.spectral);
  const double e128 = l2_norm(s128, build_background(p, s128).spectral);
  CHECK(std::abs(e64 * e64 - e128 * e128) <= 1e-2 * e128 * e128);
}

TEST_CASE("grid divergence of the untruncated field decreases under refinement") {
  const LandauParams p(2.0);
  const double d32 = fd_divergence_max(p, grid(32));
  const double d64 = fd_divergence_max(p, grid(64));
  const double d128 = fd_divergence_max(p, grid(128));
  CHECK(d64 < d32);
  CHECK(d128 < d64);
}

TEST_CASE("cross term of the norm record") {
  SpectralSpace space(grid(32));
  const BackgroundField bg = build_background(LandauParams(3.0), space);
  SpectralField3 F = transform_forward(space, random_real(32, 9));
  leray_project_inplace(space, F);
  dealias(space, F);
  const NormRecord r = norms(space, F, &bg, 1.5);
  CHECK(r.p == 1.5);
  CHECK(r.cross == doctest::Approx(grid_cross_term(space, transform_inverse(space, F), bg.velocity_gradient)));
  CHECK(norms(space, F).cross == 0.0);

  std::ostringstream out;
  write_norm_header(out);
  write_norm_row(out, 0.5, r);
  CHECK(out.str().rfind("t,l2,h1,l4,lp,p,cross\n0.5,", 0) == 0);
}

TEST_CASE("snapshot round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "landau_snapshot_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "a.bin";
  const RealField3 f = random_real(16, 2);
  write_snapshot(path, {kSnapshotVersion, 16, 1.5, -3.0}, f);
  CHECK(std::filesystem::file_size(path) == 32 + 3 * 16 * 16 * 16 * 8);
  {
    std::ifstream in(path, std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    CHECK(std::string(magic, 4) == "LNDL");
  }
  const auto [h, g] = read_snapshot(path);
  CHECK(h.N == 16);
  CHECK(h.L_box == 1.5);
  CHECK(h.c == -3.0);
  CHECK(max_diff(f, g) == 0.0);

  std::ofstream(dir / "bad.bin") << "not a snapshot";
  CHECK_THROWS(read_snapshot(dir / "bad.bin"));
  std::filesystem::resize_file(path, 100);
  CHECK_THROWS(read_snapshot(path));
  CHECK_THROWS(read_snapshot(dir / "missing.bin"));
  std::filesystem::remove_all(dir);
}
