#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "spinpair/constants.hpp"
#include "spinpair/quantum.hpp"
#include "spinpair/records.hpp"
#include "spinpair/spectral.hpp"

namespace testing {

using namespace spinpair;

// Padded FFT bin of the default grid at pad factor 4, MHz.
inline double default_bin_MHz() { return 1e3 / (401 * 2.0 * 4); }

// b1 (mT) for which g * gamma * b1 / 2pi equals `mhz`.
inline double b1_for(double mhz, double g) { return mhz_to_rad_per_us(mhz) / (g * PhysConstants::gamma_per_g); }

inline double dominant_oracle_frequency(const SpinPairParams& p, double b1, double carrier) {
  const TransientRecord t = rabi_transient_oracle(p, b1, carrier, default_tau_grid());
  return dominant_frequency(fft_magnitude(t), 0.5);
}

// omega_Delta/2pi = 50 MHz at B0 = 357.3 mT, no coupling.
inline SpinPairParams weak_pair() {
  SpinPairParams p;
  p.g_a = 2.0055;
  p.g_b = 1.9955;
  p.b0 = 357.3;
  return p;
}

// J/2pi = 500 MHz, equal g.
inline SpinPairParams strong_pair() {
  SpinPairParams p;
  p.g_a = 2.0055;
  p.g_b = 2.0055;
  p.b0 = 357.3;
  p.exchange = mhz_to_rad_per_us(500.0);
  return p;
}

inline Matrix4c random_matrix(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix4c m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = {n(rng), n(rng)};
  return m;
}

inline Matrix4c random_hermitian(std::mt19937_64& rng, double scale) {
  const Matrix4c m = random_matrix(rng);
  return 0.5 * scale * (m + m.adjoint());
}

// A A^dagger / Tr, positive semidefinite with unit trace.
inline DensityMatrix random_density(std::mt19937_64& rng) {
  const Matrix4c a = random_matrix(rng);
  Matrix4c rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(rho);
}

inline double sample_sd(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace testing
