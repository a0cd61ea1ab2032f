#pragma once

#include <vector>

#include "spinpair/quantum.hpp"
#include "spinpair/records.hpp"

namespace spinpair {

enum class CouplingRegime {
  WeakSelective,      // kappa = 1/2
  StrongUnselective,  // kappa = 1
  StrongSmallB1,      // kappa = 1/sqrt(2)
};

double kappa(CouplingRegime regime);

// Inhomogeneous line. Only `amplitude` enters the closed-form transient; the
// form and width weight the detuning samples of the oracle ensemble average.
struct LineShape {
  enum class Form { Flat, Lorentzian, Gaussian };
  double amplitude = 1.0;
  Form form = Form::Flat;
  double width = 0.0;  // rad/us (HWHM for Lorentzian, standard deviation for Gaussian)

  void validate() const;
  // Unnormalized weight of a spin packet detuned by `detuning` (rad/us).
  double weight(double detuning) const;
};

struct QuadratureSettings {
  double truncation = 10.0;  // X; enlarged automatically when the tail bound demands it
  double abs_tol = 1e-8;     // on the normalized integral
  double rel_tol = 1e-10;
  int max_intervals = 200000;

  void validate() const;
};

struct AnalyticDelta {
  double value = 0.0;           // prefactor * integral
  double integral = 0.0;        // in [0, pi]
  double integral_error = 0.0;  // quadrature + tail remainder bound
  double error = 0.0;           // on value
  double prefactor = 0.0;       // g mu_B B1 Phi / hbar, rad/us
  double truncation = 0.0;      // X actually used
};

// Omega = sqrt((kappa g gamma b1)^2 + detuning^2), rad/us.
double rabi_frequency(double kappa, double b1, double g, double detuning);

// Ensemble transient g mu_B B1 Phi * Int sin^2(Omega_0 tau sqrt(1+x^2)/2)/(1+x^2) dx
// with Omega_0 = rabi_frequency(kappa, b1, g, 0); the transient oscillates at
// Omega_0 on resonance.
AnalyticDelta delta_analytic(double tau_ns, double b1, double g, double kappa,
                             const LineShape& line = {}, const QuadratureSettings& quad = {});

TransientRecord nutation_curve(CouplingRegime regime, double b1, double g,
                               const std::vector<double>& tau_grid,
                               const QuadratureSettings& quad = {});

enum class Spin { A, B };

struct EnsembleSettings {
  int n_samples = 401;
  double half_range = 0.0;  // rad/us; detunings sampled uniformly on [-half_range, half_range]
};

// Line-shape weighted average of the exact oracle over carrier detunings
// from the selected spin's Larmor frequency.
TransientRecord detuning_averaged_oracle(const SpinPairParams& params, double b1, Spin target,
                                         const LineShape& line,
                                         const std::vector<double>& tau_grid,
                                         const EnsembleSettings& ensemble);

struct ShapeComparison {
  double scale = 0.0;          // least-squares factor applied to the candidate
  double max_deviation = 0.0;  // max |reference - scale*candidate| / max |reference|
};

ShapeComparison compare_shapes(const std::vector<double>& reference,
                               const std::vector<double>& candidate);

// Weakly coupled pair, carrier on spin a, flat detuning distribution:
// analytic ensemble transient against the averaged oracle.
struct EquivalenceSetup {
  SpinPairParams pair;
  double b1 = 0.0;                 // mT
  int n_detunings = 401;
  double half_range_widths = 20.0; // in units of the on-resonance Rabi frequency
  int n_tau = 50;
  double periods = 6.0;

  // omega_Delta/2pi ~ 196 MHz, gamma_a b1/2pi = 1 MHz, J = Dd = 0.
  static EquivalenceSetup weak_coupling();
};

struct EquivalenceResult {
  std::vector<double> tau_ns;
  std::vector<double> analytic;
  std::vector<double> oracle;
  ShapeComparison comparison;
};

EquivalenceResult oracle_equivalence(const EquivalenceSetup& setup);

}  // namespace spinpair
