#pragma once

#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spinpair/config.hpp"
#include "spinpair/dataio.hpp"
#include "spinpair/fitting.hpp"
#include "spinpair/gfactor.hpp"
#include "spinpair/records.hpp"
#include "spinpair/spectral.hpp"

namespace spinpair {

namespace exit_code {
constexpr int ok = 0;
constexpr int usage = 2;     // configuration, parse and argument errors
constexpr int io = 3;
constexpr int analysis = 4;  // fits, maxima, inconsistent measurements
}  // namespace exit_code

int exit_code_for(const std::exception& e);

// Decay of the envelope maxima of one transient.
struct DecayReport {
  std::size_t n_maxima = 0;
  Measured decay_time_ns;
  Measured rate_per_ns;
  // Rate above threshold_sigmas and at least 5% decay over the record.
  bool detected = false;
  std::string error;  // set when no fit was possible
};

DecayReport analyze_decay(const TransientRecord& transient, std::optional<double> min_spacing_ns,
                          double threshold_sigmas);

struct TransientAnalysis {
  SpectrumRecord spectrum;  // analysis window
  SpectrumRecord seed;      // Hann window
  RabiLevel level;
  DecayReport decay;
};

// Spectra only; no fitting.
TransientAnalysis transform_transient(const TransientRecord& transient, const AnalysisConfig& options);
// Fills level and decay of a transformed transient.
void analyze_transient(TransientAnalysis& analysis, const TransientRecord& transient,
                       const AnalysisConfig& options);

Json to_json(const Measured& m);
Measured measured_from_json(const Json& j);
Json to_json(const DecayReport& d);
Json to_json(const RabiLevel& level);
RabiLevel level_from_json(const Json& j);
// Levels as in the analyze output: {"levels": [{..., "decay": {...}}, ...]}.
RabiComponentTable component_table_from_json(const Json& doc);

// Detuning for the L and H peaks, kappa ratio and decay-width consistency of
// a two-level table. Failures of one quantity are reported in place.
Json extract_report(const Json& components, const AnalysisConfig& options);

// Two-Lorentzian fits of field sweeps, g per peak and angle, anisotropy
// verdict per peak. Peaks keep their identity by amplitude rank.
Json sweep_report(const std::vector<SweepRecord>& sweeps, int n_peaks, double threshold_sigmas);

std::vector<SweepRecord> simulate_sweeps(const SweepConfig& sweep, std::uint64_t seed);
std::vector<TransientRecord> simulate_transients(const TransientConfig& transient,
                                                 const std::vector<double>& grid, std::uint64_t seed);

// Parses arguments and runs one subcommand; returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace spinpair
