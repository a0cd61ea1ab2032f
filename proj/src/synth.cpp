#include "spinpair/synth.hpp"

#include <cmath>
#include <random>

#include "spinpair/constants.hpp"
#include "spinpair/errors.hpp"

namespace spinpair {

void add_gaussian_noise(std::vector<double>& q, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw InvalidInput("noise sigma must be finite and non-negative");
  if (sigma == 0.0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& v : q) v += noise(rng);
}

TransientRecord synthesize_transient(const std::vector<OscComponent>& components,
                                     const std::vector<double>& tau_grid, double noise_sigma,
                                     std::uint64_t seed) {
  if (tau_grid.empty()) throw InvalidInput("synthesize_transient: empty grid");
  if (!strictly_increasing(tau_grid))
    throw InvalidInput("synthesize_transient: grid must be strictly increasing");
  for (const auto& c : components) {
    if (!(c.decay_time_ns > 0.0)) throw InvalidInput("component decay time must be positive");
    if (!std::isfinite(c.omega) || !std::isfinite(c.amplitude) || !std::isfinite(c.phase))
      throw InvalidInput("component parameters must be finite");
  }
  TransientRecord rec;
  rec.tau_ns = tau_grid;
  rec.q.assign(tau_grid.size(), 0.0);
  for (std::size_t k = 0; k < tau_grid.size(); ++k) {
    const double t_us = ns_to_us(tau_grid[k]);
    for (const auto& c : components) {
      const double envelope = std::isinf(c.decay_time_ns) ? 1.0 : std::exp(-tau_grid[k] / c.decay_time_ns);
      rec.q[k] += c.amplitude * envelope * (1.0 - std::cos(c.omega * t_us + c.phase));
    }
  }
  add_gaussian_noise(rec.q, noise_sigma, seed);
  rec.meta.seed = seed;
  rec.meta.noise_sigma = noise_sigma;
  rec.meta.components = components;
  return rec;
}

SweepRecord synthesize_sweep(const std::vector<LorentzianPeak>& peaks,
                             const std::vector<double>& b0_grid, double noise_sigma,
                             std::uint64_t seed) {
  if (b0_grid.empty()) throw InvalidInput("synthesize_sweep: empty grid");
  if (!strictly_increasing(b0_grid))
    throw InvalidInput("synthesize_sweep: grid must be strictly increasing");
  for (const auto& p : peaks)
    if (!(p.hwhm > 0.0)) throw InvalidInput("synthesize_sweep: peak width must be positive");
  SweepRecord rec;
  rec.b0_mT = b0_grid;
  rec.q.assign(b0_grid.size(), 0.0);
  for (std::size_t k = 0; k < b0_grid.size(); ++k)
    for (const auto& p : peaks) rec.q[k] += p(b0_grid[k]);
  add_gaussian_noise(rec.q, noise_sigma, seed);
  rec.meta.seed = seed;
  rec.meta.noise_sigma = noise_sigma;
  return rec;
}

double snr_per_pair(double n_shots) {
  if (!(n_shots >= 1.0)) throw InvalidInput("snr_per_pair: need at least one shot");
  return std::sqrt(n_shots) / 1e6;
}

double min_detectable_pairs(double n_shots, double target_snr) {
  if (!(target_snr > 0.0)) throw InvalidInput("min_detectable_pairs: target SNR must be positive");
  return target_snr / snr_per_pair(n_shots);
}

TransientRecord accumulate(const std::vector<TransientRecord>& records) {
  if (records.empty()) throw InvalidInput("accumulate: no records");
  TransientRecord out;
  out.tau_ns = records.front().tau_ns;
  out.q.assign(out.tau_ns.size(), 0.0);
  out.meta = records.front().meta;
  out.meta.n_shots = 0;
  for (const auto& r : records) {
    if (r.tau_ns != out.tau_ns || r.q.size() != out.q.size())
      throw InvalidInput("accumulate: mismatched grids");
    for (std::size_t k = 0; k < out.q.size(); ++k) out.q[k] += r.q[k];
    out.meta.n_shots += r.meta.n_shots;
  }
  const double n = static_cast<double>(records.size());
  for (double& v : out.q) v /= n;
  out.meta.noise_sigma = records.front().meta.noise_sigma / std::sqrt(n);
  return out;
}

}  // namespace spinpair
