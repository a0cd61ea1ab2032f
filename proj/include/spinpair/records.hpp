#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spinpair {

// Value with its 1 sigma uncertainty.
struct Measured {
  double value = 0.0;
  double sigma = 0.0;
};

// One damped Rabi component of a synthetic transient.
struct OscComponent {
  double omega = 0.0;          // rad/us
  double amplitude = 0.0;      // a.u.
  double decay_time_ns = 0.0;  // may be +inf
  double phase = 0.0;          // rad
};

struct TransientMeta {
  std::string b1_label;
  std::optional<double> b1_mT;
  std::uint64_t seed = 0;
  int n_shots = 1;
  double noise_sigma = 0.0;
  std::vector<OscComponent> components;
};

// Q(tau) on a strictly increasing pulse-length grid.
struct TransientRecord {
  std::vector<double> tau_ns;
  std::vector<double> q;
  TransientMeta meta;

  std::size_t size() const { return tau_ns.size(); }
  void validate() const;
};

struct SweepMeta {
  double angle_deg = 90.0;
  double omega_carrier = 0.0;  // rad/us
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;
};

// Q(B0) field sweep.
struct SweepRecord {
  std::vector<double> b0_mT;
  std::vector<double> q;
  SweepMeta meta;

  std::size_t size() const { return b0_mT.size(); }
  void validate() const;
};

enum class Window { Rectangular, Hann };

// How a magnitude spectrum was produced from its transient. Present only for
// spectra computed by fft_magnitude; needed to calibrate line widths.
struct SpectrumSource {
  std::size_t n_samples = 0;
  double tau_start_ns = 0.0;
  double dt_ns = 0.0;
  int pad_factor = 1;
  Window window = Window::Rectangular;
};

// Generic sampled spectrum: FFT magnitude vs frequency (MHz) or Q vs B0 (mT).
struct SpectrumRecord {
  std::vector<double> x;
  std::vector<double> y;
  std::string label;
  std::optional<double> b1_mT;
  std::optional<SpectrumSource> source;

  std::size_t size() const { return x.size(); }
  void validate() const;
};

SpectrumRecord as_spectrum(const SweepRecord& sweep);

// Uniform grid start, start+step, ... up to stop (inclusive within 1e-9 step).
std::vector<double> uniform_grid(double start, double stop, double step);

// 0..800 ns in 2 ns steps (401 points).
std::vector<double> default_tau_grid();

bool strictly_increasing(const std::vector<double>& v);

}  // namespace spinpair
