#pragma once

#include <cstdint>
#include <vector>

#include "spinpair/lorentzian.hpp"
#include "spinpair/records.hpp"

namespace spinpair {

// q(tau) = sum_j A_j exp(-tau/T_j) (1 - cos(Omega_j tau + phi_j)) + N(0, sigma^2).
TransientRecord synthesize_transient(const std::vector<OscComponent>& components,
                                     const std::vector<double>& tau_grid, double noise_sigma,
                                     std::uint64_t seed);

// Adds N(0, sigma^2) from a mt19937_64 seeded with `seed`.
void add_gaussian_noise(std::vector<double>& q, double sigma, std::uint64_t seed);

SweepRecord synthesize_sweep(const std::vector<LorentzianPeak>& peaks,
                             const std::vector<double>& b0_grid, double noise_sigma,
                             std::uint64_t seed);

// Signal to noise ratio per charge carrier pair after n accumulated shots.
double snr_per_pair(double n_shots);

// Smallest number of responding pairs reaching `target_snr` after n shots.
double min_detectable_pairs(double n_shots, double target_snr = 3.0);

// Pointwise mean of records on identical grids.
TransientRecord accumulate(const std::vector<TransientRecord>& records);

}  // namespace spinpair
