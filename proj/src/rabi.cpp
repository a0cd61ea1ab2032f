#include "spinpair/rabi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spinpair/constants.hpp"
#include "spinpair/errors.hpp"
#include "spinpair/parallel.hpp"
#include "spinpair/quadrature.hpp"

namespace spinpair {

double kappa(CouplingRegime regime) {
  switch (regime) {
    case CouplingRegime::WeakSelective: return 0.5;
    case CouplingRegime::StrongUnselective: return 1.0;
    case CouplingRegime::StrongSmallB1: return 1.0 / std::numbers::sqrt2;
  }
  throw InvalidInput("unknown coupling regime");
}

void LineShape::validate() const {
  if (!(amplitude >= 0.0)) throw InvalidInput("line shape: amplitude must be non-negative");
  if (form != Form::Flat && !(width > 0.0))
    throw InvalidInput("line shape: width must be positive");
}

double LineShape::weight(double detuning) const {
  switch (form) {
    case Form::Flat: return 1.0;
    case Form::Lorentzian: return 1.0 / (1.0 + (detuning / width) * (detuning / width));
    case Form::Gaussian: return std::exp(-0.5 * (detuning / width) * (detuning / width));
  }
  return 0.0;
}

void QuadratureSettings::validate() const {
  if (!(truncation >= 10.0)) throw InvalidInput("quadrature: truncation X must be >= 10");
  if (!(rel_tol <= 1e-6) || !(rel_tol >= 0.0))
    throw InvalidInput("quadrature: relative tolerance must be <= 1e-6");
  if (!(abs_tol > 0.0)) throw InvalidInput("quadrature: absolute tolerance must be positive");
  if (max_intervals < 1) throw InvalidInput("quadrature: interval budget must be positive");
}

double rabi_frequency(double kappa, double b1, double g, double detuning) {
  if (!(kappa > 0.0)) throw InvalidInput("rabi_frequency: kappa must be positive");
  if (!(b1 >= 0.0)) throw InvalidInput("rabi_frequency: b1 must be non-negative");
  return std::hypot(kappa * larmor(g, b1), detuning);
}

namespace {

// h(u) = 1/(u sqrt(u^2-1)) is dx/(1+x^2) per du with u = sqrt(1+x^2).
double tail_weight(double u) { return 1.0 / (u * std::sqrt(u * u - 1.0)); }
double tail_weight_slope(double u) {
  const double q = u * u * u * u - u * u;
  return -(2.0 * u * u * u - u) / (q * std::sqrt(q));
}

constexpr double kMaxTruncation = 1e8;

// Int_{-inf}^{inf} sin^2(a sqrt(1+x^2))/(1+x^2) dx with its error bound.
std::pair<double, double> normalized_integral(double a, const QuadratureSettings& quad,
                                              double& truncation) {
  // Beyond X the integrand splits into the mean 1/(2(1+x^2)) and an
  // oscillating part; the latter is integrated by parts once and the remainder
  // bounded by |h'(U)|/(2a^2).
  double x = quad.truncation;
  auto remainder_bound = [a](double xx) {
    return std::abs(tail_weight_slope(std::sqrt(1.0 + xx * xx))) / (2.0 * a * a);
  };
  while (remainder_bound(x) > 0.25 * quad.abs_tol && x < kMaxTruncation) x *= 2.0;
  truncation = x;
  const double u = std::sqrt(1.0 + x * x);
  const double tail = (0.5 * std::numbers::pi - std::atan(x)) +
                      std::sin(2.0 * a * u) * tail_weight(u) / (2.0 * a);
  const double tail_error = remainder_bound(x);

  auto f = [a](double t) {
    const double s = std::sin(a * std::sqrt(1.0 + t * t));
    return s * s / (1.0 + t * t);
  };
  const double panels = std::clamp(std::ceil(x * a / std::numbers::pi), 8.0, 5e5);
  const double budget = std::max(0.5 * quad.abs_tol - tail_error, 0.0);
  const QuadratureResult q = integrate_gauss_kronrod(f, 0.0, x, 0.5 * budget, 0.5 * quad.rel_tol,
                                                     quad.max_intervals + static_cast<int>(panels),
                                                     static_cast<int>(panels));
  const double value = 2.0 * q.value + tail;
  const double error = 2.0 * q.error + tail_error;
  if (!q.converged || tail_error > 0.25 * quad.abs_tol)
    throw QuadratureFailure("delta_analytic: tolerance not reached within budget", value, error);
  return {value, error};
}

}  // namespace

AnalyticDelta delta_analytic(double tau_ns, double b1, double g, double kappa,
                             const LineShape& line, const QuadratureSettings& quad) {
  if (!(tau_ns >= 0.0)) throw InvalidInput("delta_analytic: tau must be non-negative");
  if (!(g > 0.0)) throw InvalidInput("delta_analytic: g must be positive");
  line.validate();
  quad.validate();
  const double omega0 = rabi_frequency(kappa, b1, g, 0.0);
  AnalyticDelta out;
  out.prefactor = larmor(g, b1) * line.amplitude;
  out.truncation = quad.truncation;
  const double a = 0.5 * omega0 * ns_to_us(tau_ns);
  if (a == 0.0) return out;
  const auto [integral, error] = normalized_integral(a, quad, out.truncation);
  out.integral = integral;
  out.integral_error = error;
  out.value = out.prefactor * integral;
  out.error = out.prefactor * error;
  return out;
}

TransientRecord nutation_curve(CouplingRegime regime, double b1, double g,
                               const std::vector<double>& tau_grid,
                               const QuadratureSettings& quad) {
  if (!strictly_increasing(tau_grid)) throw InvalidInput("nutation_curve: grid must be increasing");
  TransientRecord rec;
  rec.tau_ns = tau_grid;
  rec.q.assign(tau_grid.size(), 0.0);
  rec.meta.b1_mT = b1;
  const double k = kappa(regime);
  parallel_for(tau_grid.size(), [&](std::size_t i) {
    rec.q[i] = delta_analytic(tau_grid[i], b1, g, k, LineShape{}, quad).value;
  });
  return rec;
}

TransientRecord detuning_averaged_oracle(const SpinPairParams& params, double b1, Spin target,
                                         const LineShape& line,
                                         const std::vector<double>& tau_grid,
                                         const EnsembleSettings& ensemble) {
  line.validate();
  if (ensemble.n_samples < 1) throw InvalidInput("ensemble: need at least one sample");
  if (!(ensemble.half_range >= 0.0)) throw InvalidInput("ensemble: half range must be >= 0");
  const double center = target == Spin::A ? params.larmor_a() : params.larmor_b();
  const int n = ensemble.n_samples;
  std::vector<double> detunings(n, 0.0);
  if (n > 1)
    for (int i = 0; i < n; ++i)
      detunings[i] = -ensemble.half_range + 2.0 * ensemble.half_range * i / (n - 1);

  std::vector<std::vector<double>> traces(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    traces[i] = rabi_transient_oracle(params, b1, center + detunings[i], tau_grid).q;
  });

  TransientRecord rec;
  rec.tau_ns = tau_grid;
  rec.q.assign(tau_grid.size(), 0.0);
  rec.meta.b1_mT = b1;
  double total_weight = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = line.weight(detunings[i]);
    total_weight += w;
    for (std::size_t k = 0; k < tau_grid.size(); ++k) rec.q[k] += w * traces[i][k];
  }
  for (double& v : rec.q) v *= line.amplitude / total_weight;
  return rec;
}

ShapeComparison compare_shapes(const std::vector<double>& reference,
                               const std::vector<double>& candidate) {
  if (reference.size() != candidate.size() || reference.empty())
    throw InvalidInput("compare_shapes: need equal, non-empty arrays");
  double rc = 0.0, cc = 0.0, rmax = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    rc += reference[i] * candidate[i];
    cc += candidate[i] * candidate[i];
    rmax = std::max(rmax, std::abs(reference[i]));
  }
  if (cc == 0.0 || rmax == 0.0) throw InvalidInput("compare_shapes: all-zero input");
  ShapeComparison out;
  out.scale = rc / cc;
  for (std::size_t i = 0; i < reference.size(); ++i)
    out.max_deviation = std::max(out.max_deviation, std::abs(reference[i] - out.scale * candidate[i]));
  out.max_deviation /= rmax;
  return out;
}

EquivalenceSetup EquivalenceSetup::weak_coupling() {
  EquivalenceSetup s;
  s.pair.g_a = 2.03;
  s.pair.g_b = 1.99;
  s.pair.b0 = 350.0;
  s.b1 = mhz_to_rad_per_us(1.0) / (s.pair.g_a * PhysConstants::gamma_per_g);
  return s;
}

EquivalenceResult oracle_equivalence(const EquivalenceSetup& setup) {
  if (setup.n_tau < 2) throw InvalidInput("oracle_equivalence: need at least 2 tau points");
  const double k = kappa(CouplingRegime::WeakSelective);
  const double omega0 = rabi_frequency(k, setup.b1, setup.pair.g_a, 0.0);
  if (!(omega0 > 0.0)) throw InvalidInput("oracle_equivalence: b1 must be positive");
  EquivalenceResult out;
  const double stop_ns = us_to_ns(setup.periods * 2.0 * std::numbers::pi / omega0);
  for (int i = 0; i < setup.n_tau; ++i) out.tau_ns.push_back(stop_ns * i / (setup.n_tau - 1));

  const TransientRecord oracle = detuning_averaged_oracle(
      setup.pair, setup.b1, Spin::A, LineShape{}, out.tau_ns,
      EnsembleSettings{setup.n_detunings, setup.half_range_widths * omega0});
  out.oracle = oracle.q;
  out.analytic = nutation_curve(CouplingRegime::WeakSelective, setup.b1, setup.pair.g_a, out.tau_ns).q;
  out.comparison = compare_shapes(out.analytic, out.oracle);
  return out;
}

}  // namespace spinpair
