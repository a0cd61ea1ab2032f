#include "spinpair/gfactor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spinpair/constants.hpp"
#include "spinpair/errors.hpp"

namespace spinpair {

double g_factor(double omega_carrier, double b_res_mT) {
  if (!(b_res_mT > 0.0)) throw InvalidInput("g_factor: resonance field must be positive");
  return omega_carrier / (PhysConstants::gamma_per_g * b_res_mT);
}

Measured g_factor(double omega_carrier, Measured b_res_mT) {
  const double g = g_factor(omega_carrier, b_res_mT.value);
  return {g, g * b_res_mT.sigma / b_res_mT.value};
}

double resonance_field(double omega_carrier, double g) {
  if (!(g > 0.0)) throw InvalidInput("resonance_field: g must be positive");
  return omega_carrier / (PhysConstants::gamma_per_g * g);
}

double axial_g(double theta_deg, double g_par, double g_perp) {
  if (!(g_par > 0.0) || !(g_perp > 0.0)) throw InvalidInput("axial_g: g values must be positive");
  const double t = theta_deg * std::numbers::pi / 180.0;
  const double c = std::cos(t), s = std::sin(t);
  return std::sqrt(g_par * g_par * c * c + g_perp * g_perp * s * s);
}

void validate_series(const AngleSeries& series) {
  for (const auto& e : series) {
    if (!(e.angle_deg >= 0.0 && e.angle_deg <= 90.0))
      throw InvalidInput("angle series: angles must lie in [0, 90] degrees");
    if (!(e.g.value > 1.5 && e.g.value < 2.5))
      throw InvalidInput("angle series: g value outside (1.5, 2.5)");
    if (!(e.g.sigma > 0.0)) throw InvalidInput("angle series: g uncertainties must be positive");
  }
}

AnisotropyFit fit_anisotropy(const AngleSeries& series, double threshold_sigmas) {
  validate_series(series);
  std::vector<double> angles;
  for (const auto& e : series) angles.push_back(e.angle_deg);
  std::sort(angles.begin(), angles.end());
  const auto distinct = std::unique(angles.begin(), angles.end(),
                                    [](double a, double b) { return std::abs(a - b) < 1e-9; }) -
                        angles.begin();
  if (series.size() < 3) throw InvalidInput("fit_anisotropy: need at least 3 angles");
  if (distinct < 3) throw InvalidInput("fit_anisotropy: need at least 3 distinct angles");

  // g^2 = g_perp^2 + (g_par^2 - g_perp^2) cos^2(theta) is linear in cos^2.
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& e : series) {
    const double c = std::cos(e.angle_deg * std::numbers::pi / 180.0);
    const double x = c * c, y = e.g.value * e.g.value;
    const double w = 1.0 / (e.g.sigma * e.g.sigma);
    sw += w;
    sx += w * x;
    sy += w * y;
    sxx += w * x * x;
    sxy += w * x * y;
  }
  const double slope = (sw * sxy - sx * sy) / (sw * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / sw;
  Eigen::VectorXd p0(2);
  p0 << std::sqrt(std::max(intercept + slope, 1.0)), std::sqrt(std::max(intercept, 1.0));

  const Eigen::Index m = static_cast<Eigen::Index>(series.size());
  auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(m);
    for (Eigen::Index i = 0; i < m; ++i)
      r(i) = (series[i].g.value - axial_g(series[i].angle_deg, p(0), p(1))) / series[i].g.sigma;
    return r;
  };
  LsqOptions lsq;
  lsq.absolute_sigma = true;
  lsq.lower = Eigen::VectorXd::Constant(2, 1e-6);
  lsq.jacobian = [&](const Eigen::VectorXd& p) {
    Eigen::MatrixXd j(m, 2);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double t = series[i].angle_deg * std::numbers::pi / 180.0;
      const double c2 = std::cos(t) * std::cos(t), s2 = 1.0 - c2;
      const double g = axial_g(series[i].angle_deg, p(0), p(1));
      j(i, 0) = -p(0) * c2 / g / series[i].g.sigma;
      j(i, 1) = -p(1) * s2 / g / series[i].g.sigma;
    }
    return j;
  };

  AnisotropyFit out;
  out.fit = solve_damped_lsq(residuals, p0, lsq);
  out.g_par = {out.fit.params(0), out.fit.sigma(0)};
  out.g_perp = {out.fit.params(1), out.fit.sigma(1)};
  const auto& c = out.fit.covariance;
  out.difference = {out.g_par.value - out.g_perp.value,
                    std::sqrt(std::max(c(0, 0) + c(1, 1) - 2.0 * c(0, 1), 0.0))};
  out.significance = out.difference.sigma > 0.0 ? std::abs(out.difference.value) / out.difference.sigma
                                                 : 0.0;
  out.isotropic = std::abs(out.difference.value) < threshold_sigmas * out.difference.sigma;
  return out;
}

}  // namespace spinpair
