#include <doctest.h>

#include "spinpair/errors.hpp"
#include "spinpair/gfactor.hpp"
#include "support.hpp"

using namespace spinpair;
using namespace testing;

namespace {

const std::vector<double> kAngles = {90.0, 60.0, 30.0, 0.0};

AngleSeries axial_series(double g_par, double g_perp, double sigma, const std::vector<double>& angles,
                         std::mt19937_64* rng = nullptr) {
  std::normal_distribution<double> n(0.0, sigma);
  AngleSeries s;
  for (double a : angles) s.push_back({a, {axial_g(a, g_par, g_perp) + (rng ? n(*rng) : 0.0), sigma}});
  return s;
}

}  // namespace

TEST_CASE("g factor from the resonance condition") {
  const double omega = 2 * std::numbers::pi * 1e4;  // 10 GHz in rad/us
  CHECK(g_factor(omega, 355.8) == doctest::Approx(2.008).epsilon(5e-4));
  CHECK(g_factor(omega, 2 * 355.8) == doctest::Approx(g_factor(omega, 355.8) / 2).epsilon(1e-15));
  CHECK_THROWS_AS(g_factor(omega, 0.0), InvalidInput);
  CHECK_THROWS_AS(g_factor(omega, -3.0), InvalidInput);
  const Measured m = g_factor(omega, Measured{355.8, 0.1});
  CHECK(m.sigma == doctest::Approx(m.value * 0.1 / 355.8));
}

TEST_CASE("g factor round trip") {
  double worst = 0.0;
  for (double f_GHz : {1.0, 9.7, 10.0, 34.0})
    for (double g : {1.9, 2.0, 2.0023, 2.008, 2.3}) {
      const double omega = 2 * std::numbers::pi * f_GHz * 1e3;
      worst = std::max(worst, std::abs(g_factor(omega, resonance_field(omega, g)) - g) / g);
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("axial g") {
  CHECK(axial_g(0.0, 2.0015, 2.0087) == doctest::Approx(2.0015).epsilon(1e-15));
  CHECK(axial_g(90.0, 2.0015, 2.0087) == doctest::Approx(2.0087).epsilon(1e-15));
  for (double a = 0.0; a <= 90.0; a += 7.5) CHECK(axial_g(a, 2.003, 2.003) == doctest::Approx(2.003).epsilon(1e-15));
  CHECK_THROWS_AS(axial_g(10.0, 0.0, 2.0), InvalidInput);
}

TEST_CASE("anisotropy fit: noiseless axial data") {
  const AnisotropyFit f = fit_anisotropy(axial_series(2.0015, 2.0087, 1e-4, kAngles));
  CHECK(f.g_par.value == doctest::Approx(2.0015).epsilon(1e-10));
  CHECK(f.g_perp.value == doctest::Approx(2.0087).epsilon(1e-10));
  CHECK(f.verdict() == "anisotropic");
  CHECK(f.difference.value == doctest::Approx(2.0015 - 2.0087).epsilon(1e-6));
}

TEST_CASE("anisotropy fit: constant g with noise is isotropic") {
  std::mt19937_64 rng(17);
  const AnisotropyFit f = fit_anisotropy(axial_series(1.999, 1.999, 2e-4, kAngles, &rng));
  MESSAGE("significance " << f.significance);
  CHECK(f.isotropic);
  CHECK(f.verdict() == "isotropic");
}

TEST_CASE("anisotropy fit: theta -> 90 - theta with swapped g") {
  std::mt19937_64 rng(4);
  const AngleSeries a = axial_series(2.0015, 2.0087, 3e-4, {0.0, 20.0, 45.0, 70.0, 90.0}, &rng);
  AngleSeries b = a;
  for (auto& e : b) e.angle_deg = 90.0 - e.angle_deg;
  const AnisotropyFit fa = fit_anisotropy(a);
  const AnisotropyFit fb = fit_anisotropy(b);
  CHECK(fa.fit.chi2 == doctest::Approx(fb.fit.chi2).epsilon(1e-8));
  CHECK(fa.g_par.value == doctest::Approx(fb.g_perp.value).epsilon(1e-10));
  CHECK(fa.g_perp.value == doctest::Approx(fb.g_par.value).epsilon(1e-10));
  for (Eigen::Index i = 0; i < fa.fit.jacobian.rows(); ++i) {
    const double ra = a[i].g.value - axial_g(a[i].angle_deg, fa.g_par.value, fa.g_perp.value);
    const double rb = b[i].g.value - axial_g(b[i].angle_deg, fb.g_par.value, fb.g_perp.value);
    CHECK(ra == doctest::Approx(rb).scale(1e-3).epsilon(1e-6));
  }
}

TEST_CASE("anisotropy verdict is stable under sigma scaling above 4 sigma") {
  const double sigma = 3e-4;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    std::mt19937_64 rng(seed);
    const AngleSeries base = axial_series(2.0015, 2.0087, sigma, kAngles, &rng);
    const AnisotropyFit ref = fit_anisotropy(base);
    if (ref.significance <= 4.0) continue;
    for (double scale : {0.5, 0.75, 1.25, 1.5, 2.0}) {
      AngleSeries scaled = base;
      for (auto& e : scaled) e.g.sigma *= scale;
      CHECK(fit_anisotropy(scaled).verdict() == ref.verdict());
    }
  }
}

TEST_CASE("anisotropy fit: input validation") {
  CHECK_THROWS_AS(fit_anisotropy(axial_series(2.0, 2.01, 1e-4, {90.0, 0.0})), InvalidInput);
  CHECK_THROWS_AS(fit_anisotropy(axial_series(2.0, 2.01, 1e-4, {30.0, 30.0, 30.0, 0.0})), InvalidInput);
  CHECK_THROWS_AS(fit_anisotropy(axial_series(2.0, 2.01, 1e-4, {120.0, 60.0, 30.0})), InvalidInput);
  AngleSeries bad = axial_series(2.0, 2.01, 1e-4, kAngles);
  bad[1].g.value = 3.1;
  CHECK_THROWS_AS(fit_anisotropy(bad), InvalidInput);
}
