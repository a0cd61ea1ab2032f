#include <doctest.h>

#include "spinpair/errors.hpp"
#include "spinpair/spectral.hpp"
#include "spinpair/synth.hpp"
#include "support.hpp"

using namespace spinpair;
using namespace testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Rabi's formula in ordinary frequency units (MHz).
double rabi_MHz(double kappa, double f1, double detuning) { return std::hypot(kappa * f1, detuning); }

Measured exact(double v) { return {v, 0.0}; }

TransientRecord tone(double f_MHz, double decay_ns = kInf) {
  return synthesize_transient({{mhz_to_rad_per_us(f_MHz), 1.0, decay_ns, 0.0}}, default_tau_grid(), 0.0, 1);
}

TransientRecord two_components(double fl, double fh, double noise_ratio, std::uint64_t seed) {
  const std::vector<OscComponent> c = {{mhz_to_rad_per_us(fl), 1.0, 500.0, 0.0},
                                       {mhz_to_rad_per_us(fh), 0.4, 500.0, 0.0}};
  const TransientRecord clean = synthesize_transient(c, default_tau_grid(), 0.0, seed);
  const double peak = *std::max_element(clean.q.begin(), clean.q.end());
  return synthesize_transient(c, default_tau_grid(), noise_ratio * peak, seed);
}

}  // namespace

TEST_CASE("fft: 10 MHz cosine on the default grid") {
  TransientRecord t;
  t.tau_ns = default_tau_grid();
  for (double tau : t.tau_ns) t.q.push_back(std::cos(2 * std::numbers::pi * 10.0 * tau * 1e-3));
  const SpectrumRecord s = fft_magnitude(t);
  CHECK(s.x[1] - s.x[0] == doctest::Approx(default_bin_MHz()).epsilon(1e-12));
  CHECK(std::abs(dominant_frequency(s) - 10.0) <= default_bin_MHz());
  CHECK(s.x.back() == doctest::Approx(250.0).epsilon(0.01));
}

TEST_CASE("fft: tone recovered across the Nyquist range") {
  double worst = 0.0;
  for (double f = 2.0; f < 250.0; f += 6.17) {
    const double err = std::abs(dominant_frequency(fft_magnitude(tone(f)), 0.5) - f);
    worst = std::max(worst, err);
  }
  for (double f : {0.9, 124.9, 249.0}) worst = std::max(worst, std::abs(dominant_frequency(fft_magnitude(tone(f)), 0.5) - f));
  MESSAGE("worst axis error " << worst << " MHz");
  CHECK(worst <= default_bin_MHz());
}

TEST_CASE("fft: zero signal is flat zero") {
  TransientRecord t;
  t.tau_ns = default_tau_grid();
  t.q.assign(t.tau_ns.size(), 0.0);
  for (Window w : {Window::Rectangular, Window::Hann})
    for (double y : fft_magnitude(t, w).y) CHECK(y == 0.0);
}

TEST_CASE("fft: input validation") {
  TransientRecord t = tone(10.0);
  CHECK_THROWS_AS(fft_magnitude(t, Window::Rectangular, 0), InvalidInput);
  t.tau_ns[7] += 0.5;
  CHECK_THROWS_AS(fft_magnitude(t), InvalidInput);
}

TEST_CASE("fft: damped component has half-width 1/(2 pi T)") {
  ExtractOptions opts;
  opts.k_peaks = 1;
  const RabiLevel level = extract_level(tone(10.0, 500.0), opts);
  MESSAGE("raw HWHM " << level.low.raw_width.value << " MHz, calibrated " << level.low.width.value << " MHz");
  CHECK(level.low.calibrated);
  CHECK(level.low.width.value == doctest::Approx(1e3 / (2 * std::numbers::pi * 500.0)).epsilon(0.01));
}

TEST_CASE("extract: two components at SNR 30") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const RabiLevel level = extract_level(two_components(10.0, 32.0, 1.0 / 30.0, seed));
    CHECK(std::abs(level.low.omega.value - 10.0) <= 0.3);
    CHECK(std::abs(level.high.omega.value - 32.0) <= 0.3);
    CHECK(level.low.omega.value < level.high.omega.value);
    CHECK(level.low.omega.sigma >= 0.0);
    CHECK(level.high.width.sigma >= 0.0);
  }
}

TEST_CASE("extract: one component is not a pair") {
  CHECK_THROWS_AS(extract_level(tone(12.0, 500.0)), InitializationError);
}

TEST_CASE("extract: halving B1 halves the resonant line only") {
  // L on resonance, H detuned by 16 MHz; kappa = 1 for both.
  std::vector<TransientRecord> t;
  for (double f1 : {14.0, 7.0}) {
    const std::vector<OscComponent> c = {{mhz_to_rad_per_us(rabi_MHz(1, f1, 0)), 1.0, 500.0, 0.0},
                                         {mhz_to_rad_per_us(rabi_MHz(1, f1, 16)), 0.5, 500.0, 0.0}};
    t.push_back(synthesize_transient(c, default_tau_grid(), 0.0, 1));
  }
  const RabiComponentTable table = extract_components(t);
  const RabiLevel& full = table.levels[0];
  const RabiLevel& half = table.levels[1];
  CHECK(full.low.omega.value / half.low.omega.value == doctest::Approx(2.0).epsilon(0.02));
  CHECK(full.high.omega.value / half.high.omega.value < 1.5);
  CHECK(full.high.omega.value > half.high.omega.value);
}

TEST_CASE("larmor detuning: forward-generated example") {
  const double small = rabi_MHz(1, 14, 16), large = rabi_MHz(1, 28, 16);
  CHECK(small == doctest::Approx(21.26).epsilon(1e-3));
  CHECK(large == doctest::Approx(32.25).epsilon(1e-3));
  CHECK(larmor_detuning(exact(small), exact(large), 2.0).value == doctest::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("larmor detuning: on resonance and failure modes") {
  CHECK(larmor_detuning(exact(10.0), exact(20.0), 2.0).value == 0.0);
  CHECK_THROWS_AS(larmor_detuning(exact(10.0), exact(20.0), 1.0), InvalidInput);
  bool thrown = false;
  try {
    larmor_detuning({10.0, 0.1}, {21.0, 0.1}, 2.0);
  } catch (const InconsistentMeasurement& e) {
    thrown = true;
    CHECK(e.sigmas_below_zero() > 0.0);
  }
  CHECK(thrown);
  bool clipped = false;
  const Measured z = larmor_detuning_clipped({10.0, 0.2}, {20.05, 0.2}, 2.0, 1.0, &clipped);
  CHECK(clipped);
  CHECK(z.value == 0.0);
  CHECK(z.sigma > 0.0);
}

TEST_CASE("larmor detuning: noiseless inversion over a parameter grid") {
  double worst = 0.0;
  for (double xi : {1.5, 2.0, 4.0})
    for (double kappa : {0.5, 1.0 / std::sqrt(2.0), 1.0})
      for (double f1 : {2.0, 7.0, 14.0, 30.0})
        for (double d : {0.5, 3.0, 16.0, 45.0}) {
          const double got =
              larmor_detuning(exact(rabi_MHz(kappa, f1, d)), exact(rabi_MHz(kappa, xi * f1, d)), xi).value;
          worst = std::max(worst, std::abs(got - d));
        }
  MESSAGE("worst absolute error " << worst << " MHz");
  CHECK(worst <= 1e-9);
}

TEST_CASE("kappa ratio: identical and distinct coupling factors") {
  auto ratio = [](double kl, double kh, double dl, double dh) {
    return kappa_ratio(exact(rabi_MHz(kl, 14, dl)), exact(rabi_MHz(kh, 14, dh)), exact(rabi_MHz(kl, 28, dl)),
                       exact(rabi_MHz(kh, 28, dh)));
  };
  CHECK(ratio(1, 1, 4, 16).value == doctest::Approx(1.0).epsilon(1e-12));
  double worst = 0.0;
  for (double dl = -30.0; dl <= 30.0; dl += 7.5)
    for (double dh = -30.0; dh <= 30.0; dh += 7.5)
      worst = std::max(worst, std::abs(ratio(1.0 / std::sqrt(2.0), 1.0, dl, dh).value - std::sqrt(2.0)));
  MESSAGE("worst deviation from sqrt 2 over detunings " << worst);
  CHECK(worst < 1e-9);
  CHECK_THROWS_AS(kappa_ratio(exact(10), exact(20), exact(10), exact(25)), InconsistentMeasurement);
}

TEST_CASE("kappa ratio from a component table") {
  RabiComponentTable t;
  t.levels.resize(2);
  t.levels[0].low.omega = exact(rabi_MHz(0.5, 14, 0));
  t.levels[0].high.omega = exact(rabi_MHz(1.0, 14, 10));
  t.levels[1].low.omega = exact(rabi_MHz(0.5, 28, 0));
  t.levels[1].high.omega = exact(rabi_MHz(1.0, 28, 10));
  CHECK(kappa_ratio(t).value == doctest::Approx(2.0).epsilon(1e-12));
  t.levels.pop_back();
  CHECK_THROWS_AS(kappa_ratio(t), InvalidInput);
}

TEST_CASE("error propagation matches Monte-Carlo scatter") {
  std::mt19937_64 rng(31337);
  std::normal_distribution<double> n(0.0, 1.0);
  const double s = 0.4;  // MHz on every input
  const double l1 = rabi_MHz(0.7, 14, 3), h1 = rabi_MHz(1, 14, 16);
  const double l2 = rabi_MHz(0.7, 28, 3), h2 = rabi_MHz(1, 28, 16);
  const Measured det = larmor_detuning({h1, s}, {h2, s}, 2.0);
  const Measured kap = kappa_ratio({l1, s}, {h1, s}, {l2, s}, {h2, s});
  std::vector<double> dets, kaps;
  for (int i = 0; i < 500; ++i) {
    const double a = l1 + s * n(rng), b = h1 + s * n(rng), c = l2 + s * n(rng), d = h2 + s * n(rng);
    dets.push_back(larmor_detuning({b, s}, {d, s}, 2.0).value);
    kaps.push_back(kappa_ratio({a, s}, {b, s}, {c, s}, {d, s}).value);
  }
  const double rd = sample_sd(dets) / det.sigma, rk = sample_sd(kaps) / kap.sigma;
  MESSAGE("empirical/reported: detuning " << rd << ", kappa ratio " << rk);
  CHECK(rd >= 1.0 / 1.5);
  CHECK(rd <= 1.5);
  CHECK(rk >= 1.0 / 1.5);
  CHECK(rk <= 1.5);
}

TEST_CASE("detuning to field") {
  const double b16 = detuning_to_field(16.0, 2.008);
  CHECK(b16 == doctest::Approx(16.0 / (2.008 * 13.996)).epsilon(1e-4));
  CHECK(b16 >= 0.55);
  CHECK(b16 <= 0.60);
  CHECK(detuning_to_field(28.1, 2.008) == doctest::Approx(1.0).epsilon(0.005));
  CHECK(detuning_to_field(0.0, 2.008) == 0.0);
  CHECK(detuning_to_field(Measured{16.0, 10.0}, 2.008).sigma == doctest::Approx(10.0 / 16.0 * b16));
  CHECK_THROWS_AS(detuning_to_field(1.0, 0.0), InvalidInput);
}

TEST_CASE("decay width consistency") {
  const DecayWidthReport match = decay_width_consistency({500.0, 20.0}, {1e3 / (2 * std::numbers::pi * 500.0), 0.02});
  CHECK(match.expected_hwhm.value == doctest::Approx(0.3183).epsilon(1e-4));
  CHECK(match.significance == doctest::Approx(0.0).scale(1.0));
  CHECK(match.agrees);
  const double w = 2e3 / (2 * std::numbers::pi * 500.0);
  const DecayWidthReport doubled = decay_width_consistency({500.0, 20.0}, {w, 0.02});
  const double sigma_expected = 0.3183 * 20.0 / 500.0;
  CHECK(doubled.discrepancy == doctest::Approx(0.3183).epsilon(1e-3));
  CHECK(doubled.significance == doctest::Approx(0.3183 / std::hypot(sigma_expected, 0.02)).epsilon(1e-3));
  CHECK_FALSE(doubled.agrees);
  CHECK_THROWS_AS(decay_width_consistency({-5.0, 1.0}, {0.3, 0.1}), InvalidInput);
}
