#pragma once

#include <numbers>

namespace spinpair {

// Unit system used throughout: fields in mT, pulse lengths and grids in ns,
// angular frequencies in rad/us, ordinary frequencies (I/O) in MHz.
struct PhysConstants {
  static constexpr double mu_B = 9.2740100783e-24;   // J/T (CODATA 2018)
  static constexpr double hbar = 1.054571817e-34;    // J s (CODATA 2018)
  static constexpr double h = 6.62607015e-34;        // J s
  // mu_B/hbar in rad/(us mT): rad/(s T) * 1e-6 * 1e-3
  static constexpr double gamma_per_g = mu_B / hbar * 1e-9;
  static constexpr double two_pi = 2.0 * std::numbers::pi;
};

constexpr double ns_to_us(double ns) { return ns * 1e-3; }
constexpr double us_to_ns(double us) { return us * 1e3; }
constexpr double mhz_to_rad_per_us(double mhz) { return PhysConstants::two_pi * mhz; }
constexpr double rad_per_us_to_mhz(double w) { return w / PhysConstants::two_pi; }

// Angular Larmor frequency (rad/us) of a spin with Lande factor g in field b (mT).
constexpr double larmor(double g, double b_mT) { return g * PhysConstants::gamma_per_g * b_mT; }

}  // namespace spinpair
