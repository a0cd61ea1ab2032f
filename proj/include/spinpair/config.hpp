#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spinpair/dataio.hpp"
#include "spinpair/quantum.hpp"
#include "spinpair/rabi.hpp"
#include "spinpair/records.hpp"
#include "spinpair/spectral.hpp"

namespace spinpair {

// Run configuration read from a JSON document. Keys carry their unit as a
// suffix (_mT, _MHz, _ns, _deg, _rad, _au); frequencies are f = omega/2pi.
// Unknown keys and wrongly typed values are rejected with the dotted key path.

struct GridConfig {
  double tau_start_ns = 0.0;
  double tau_stop_ns = 800.0;
  double tau_step_ns = 2.0;

  std::vector<double> grid() const;
};

struct LevelConfig {
  std::string label;
  double b1_mT = 0.0;
};

// Either omega_MHz directly, or kappa (and optionally g) so that the
// frequency follows the level's b1 and the detuning.
struct ComponentConfig {
  std::optional<double> omega_MHz;
  std::optional<double> kappa;
  std::optional<double> g;
  double detuning_MHz = 0.0;
  double amplitude_au = 1.0;
  double decay_ns = std::numeric_limits<double>::infinity();
  double phase_rad = 0.0;
};

enum class TransientModel { Oracle, Analytic, Components };

struct TransientConfig {
  TransientModel model = TransientModel::Components;
  SpinPairParams pair;
  SteadyStateModel steady_state;
  std::string resonant_with = "a";  // a | b | center
  std::optional<double> carrier_MHz;
  CouplingRegime regime = CouplingRegime::WeakSelective;
  double g = 2.0055;
  double line_amplitude = 1.0;
  std::vector<LevelConfig> levels;
  std::vector<ComponentConfig> components;
  double noise_sigma_au = 0.0;  // per shot
  int n_shots = 1;

  double carrier() const;  // rad/us
  std::vector<OscComponent> components_at(double b1_mT) const;
  double effective_noise() const;
};

struct SweepPeakConfig {
  double g_par = 2.0;
  double g_perp = 2.0;
  double hwhm_mT = 0.1;
  double amplitude_au = 1.0;
};

struct SweepFileConfig {
  double angle_deg = 0.0;
  std::string path;
};

struct SweepConfig {
  double b0_start_mT = 0.0;
  double b0_stop_mT = 0.0;
  double b0_step_mT = 0.0;
  double carrier_MHz = 0.0;
  double noise_sigma_au = 0.0;
  std::vector<double> angles_deg;
  std::vector<SweepPeakConfig> peaks;
  std::vector<SweepFileConfig> files;  // measured sweeps; replaces simulation

  std::vector<double> grid() const;
};

struct AnalysisConfig {
  Window window = Window::Rectangular;
  int pad_factor = 4;
  ExtractOptions extract;
  std::optional<double> xi;
  double g = 2.008;
  double threshold_sigmas = 2.0;
  // Minimum spacing of envelope maxima as a fraction of the L period.
  double maxima_spacing_fraction = 0.75;
};

struct OutputConfig {
  std::string dir = ".";
  DataFormat format = DataFormat::Csv;
};

struct RunConfig {
  std::uint64_t seed = 0;
  OutputConfig output;
  GridConfig grid;
  std::optional<TransientConfig> transient;
  std::optional<SweepConfig> sweep;
  AnalysisConfig analysis;
  Json document = Json::object();  // as read, with overrides applied

  void set_seed(std::uint64_t s);
  std::string hash() const { return config_hash(document); }
};

RunConfig parse_config(const Json& doc);
// ParseError with line and column for malformed JSON, ConfigError otherwise.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace spinpair
