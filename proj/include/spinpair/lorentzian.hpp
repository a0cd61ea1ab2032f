#pragma once

namespace spinpair {

// Lorentzian line parameterized by its half width at half maximum.
// The center and width share the unit of the axis (mT or MHz).
struct LorentzianPeak {
  double center = 0.0;
  double hwhm = 1.0;
  double amplitude = 1.0;  // peak height above the baseline

  double operator()(double x) const {
    const double u = (x - center) / hwhm;
    return amplitude / (1.0 + u * u);
  }
};

}  // namespace spinpair
