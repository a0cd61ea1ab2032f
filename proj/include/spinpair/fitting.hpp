#pragma once

#include <optional>
#include <vector>

#include "spinpair/lorentzian.hpp"
#include "spinpair/lsq.hpp"
#include "spinpair/records.hpp"

namespace spinpair {

struct LorentzianFitOptions {
  std::optional<std::vector<LorentzianPeak>> init;
  std::optional<double> x_min;
  std::optional<double> x_max;
  // Per-point standard deviations; uniform weights when absent.
  std::optional<std::vector<double>> sigma;
};

struct LorentzianFit {
  FitResult fit;  // parameters (center, hwhm, amplitude) per peak, then baseline
  std::vector<LorentzianPeak> peaks;   // ascending center
  std::vector<LorentzianPeak> errors;  // 1 sigma, same order as peaks
  Eigen::MatrixXd peak_covariance;     // (center, hwhm, amplitude) blocks in peak order
  double baseline = 0.0;
  double baseline_sigma = 0.0;
  std::size_t first_index = 0;  // fitted sample range [first_index, last_index)
  std::size_t last_index = 0;
};

// Sum of k Lorentzians plus a constant baseline. Without `init`, starts from
// the k most prominent local maxima.
LorentzianFit fit_lorentzians(const SpectrumRecord& spectrum, int k,
                              const LorentzianFitOptions& options = {});

// Local maxima ranked by topographic prominence; ties go to the lower x.
struct PeakCandidate {
  std::size_t index = 0;
  double prominence = 0.0;
  double half_width = 0.0;  // at half prominence, x units
};
std::vector<PeakCandidate> find_peaks(const std::vector<double>& x, const std::vector<double>& y);

struct EnvelopePoint {
  double tau_ns = 0.0;
  double q = 0.0;
};

// Maxima of the 5-sample moving average, refined by a parabola through the
// neighbours. With `min_spacing_ns`, weaker maxima closer than that to a
// stronger one are dropped.
std::vector<EnvelopePoint> detect_envelope_maxima(const TransientRecord& transient,
                                                  std::optional<double> min_spacing_ns = {});

struct ExpDecayFit {
  FitResult fit;  // parameters (amplitude, rate in 1/ns)
  double amplitude = 0.0;
  double amplitude_sigma = 0.0;
  double rate = 0.0;
  double rate_sigma = 0.0;
  double decay_time_ns = 0.0;  // 1/rate, +inf when rate <= 0
  double decay_time_sigma = 0.0;
};

// A exp(-tau/T) through positive points, starting from a log-linear fit.
ExpDecayFit fit_exp_decay(const std::vector<EnvelopePoint>& points,
                          const std::optional<std::vector<double>>& sigma = {});

}  // namespace spinpair
