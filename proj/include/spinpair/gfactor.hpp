#pragma once

#include <string>
#include <vector>

#include "spinpair/lsq.hpp"
#include "spinpair/records.hpp"

namespace spinpair {

// g = omega / (gamma_per_g * B_res); omega in rad/us, field in mT.
double g_factor(double omega_carrier, double b_res_mT);
Measured g_factor(double omega_carrier, Measured b_res_mT);

// Resonance field (mT) of a center with factor g at carrier omega (rad/us).
double resonance_field(double omega_carrier, double g);

// Axially symmetric g tensor; theta is the angle between B0 and the
// symmetry axis (the interface normal), in degrees.
double axial_g(double theta_deg, double g_par, double g_perp);

struct AngleEntry {
  double angle_deg = 0.0;
  Measured g;
};

using AngleSeries = std::vector<AngleEntry>;

void validate_series(const AngleSeries& series);

struct AnisotropyFit {
  FitResult fit;  // parameters (g_par, g_perp)
  Measured g_par;
  Measured g_perp;
  Measured difference;  // g_par - g_perp
  double significance = 0.0;  // |difference| / sigma
  bool isotropic = false;

  std::string verdict() const { return isotropic ? "isotropic" : "anisotropic"; }
};

// Weighted fit of axial_g to the series (sigmas taken as absolute). The
// series is isotropic when |g_par - g_perp| < threshold_sigmas * sigma.
AnisotropyFit fit_anisotropy(const AngleSeries& series, double threshold_sigmas = 2.0);

}  // namespace spinpair
