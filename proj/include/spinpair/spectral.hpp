#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spinpair/fitting.hpp"
#include "spinpair/records.hpp"

namespace spinpair {

// Mean-subtracted, windowed, zero-padded |FFT| scaled so a sinusoid of
// amplitude A on a bin shows height A. Frequency axis in MHz (0..Nyquist).
SpectrumRecord fft_magnitude(const TransientRecord& transient, Window window = Window::Rectangular,
                             int zero_pad_factor = 4);

// Position of the highest point at x >= min_x, refined by a parabola.
double dominant_frequency(const SpectrumRecord& spectrum, double min_x = 0.0);

struct ComponentEstimate {
  Measured omega;      // MHz; center of the calibrated component when calibrated
  Measured raw_omega;  // center of the Lorentzian fitted to the magnitude spectrum
  Measured width;      // HWHM, MHz; decay-equivalent when calibrated
  Measured raw_width;  // HWHM of the Lorentzian fitted to the magnitude spectrum
  Measured amplitude;  // spectrum height above the baseline
  bool calibrated = false;
};

struct RabiLevel {
  std::string b1_label;
  std::optional<double> b1_mT;
  ComponentEstimate low;   // lowest-frequency peak (L)
  ComponentEstimate high;  // highest-frequency peak (H)
  std::vector<ComponentEstimate> peaks;  // all fitted peaks, ascending frequency
  double baseline = 0.0;
};

struct RabiComponentTable {
  std::vector<RabiLevel> levels;
};

struct ExtractOptions {
  int k_peaks = 2;
  double min_freq_MHz = 2.5;
  std::optional<double> max_freq_MHz;
  // Report widths as 1/(2 pi T) of the damped components that reproduce the
  // fitted spectrum, removing the broadening from the finite record.
  bool calibrate_widths = true;
  // Seed candidates weaker than this fraction of the strongest are ignored.
  double min_relative_prominence = 0.1;
};

// Seeds from the most prominent maxima of `seed_spectrum` (the spectrum
// itself when absent), skipping candidates inside the main lobe of a
// stronger one; throws InitializationError when fewer than k remain.
std::vector<LorentzianPeak> seed_peaks(const SpectrumRecord& spectrum,
                                       const SpectrumRecord* seed_spectrum,
                                       const ExtractOptions& options);

RabiLevel extract_level(const SpectrumRecord& spectrum, const ExtractOptions& options = {},
                        const SpectrumRecord* seed_spectrum = nullptr);

// Rectangular spectrum for the fit, Hann spectrum for seeding.
RabiLevel extract_level(const TransientRecord& transient, const ExtractOptions& options = {},
                        int zero_pad_factor = 4);

RabiComponentTable extract_components(const std::vector<SpectrumRecord>& spectra,
                                      const ExtractOptions& options = {});
RabiComponentTable extract_components(const std::vector<TransientRecord>& transients,
                                      const ExtractOptions& options = {}, int zero_pad_factor = 4);

struct WidthCalibration {
  std::vector<Measured> center;     // MHz
  std::vector<Measured> hwhm;       // 1/(2 pi T), MHz
  std::vector<Measured> amplitude;  // of the (1 - cos) kernel
  std::vector<bool> reproduced;     // per peak: fitted triple matched
  double noise_scale = 0.0;         // per-component noise of the magnitude spectrum
  FitResult fit;
};

// Finds damped (1 - cos) components whose spectrum, processed exactly like
// the observed one, reproduces the fitted (center, width, height) of each
// peak. The model magnitude is replaced by its expectation under the noise
// level seen in the off-peak bins. Uncertainties follow from the observed
// fit covariance.
WidthCalibration calibrate_widths(const LorentzianFit& observed, const SpectrumRecord& spectrum,
                                  const LorentzianFitOptions& range);

// Mean of |s + n| for complex Gaussian n with per-component deviation `scale`.
double rice_mean(double magnitude, double scale);

// Larmor detuning from Rabi frequencies of one component measured at B1
// (omega_small) and xi*B1 (omega_large):
// sqrt((xi^2 omega_small^2 - omega_large^2) / (xi^2 - 1)).
Measured larmor_detuning(Measured omega_small, Measured omega_large, double xi);

// As above, but a discriminant at most `tolerance_sigmas` below zero is read
// as zero detuning (sigma sqrt(sigma_disc / (xi^2 - 1))); `clipped` reports it.
Measured larmor_detuning_clipped(Measured omega_small, Measured omega_large, double xi,
                                 double tolerance_sigmas, bool* clipped = nullptr);

// kappa_H / kappa_L = sqrt((H1^2 - H2^2) / (L1^2 - L2^2)) from two B1 levels.
Measured kappa_ratio(Measured low_1, Measured high_1, Measured low_2, Measured high_2);
Measured kappa_ratio(const RabiComponentTable& table);

double detuning_to_field(double delta_MHz, double g);
Measured detuning_to_field(Measured delta_MHz, double g);

struct DecayWidthReport {
  Measured expected_hwhm;  // 1/(2 pi T), MHz
  Measured width;
  double discrepancy = 0.0;   // width - expected
  double significance = 0.0;  // |discrepancy| in combined sigma
  bool agrees = false;        // significance <= 1
};

DecayWidthReport decay_width_consistency(Measured decay_time_ns, Measured width_MHz);

}  // namespace spinpair
