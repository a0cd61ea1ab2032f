#include "spinpair/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include <CLI11.hpp>

#include "spinpair/constants.hpp"
#include "spinpair/errors.hpp"
#include "spinpair/quantum.hpp"
#include "spinpair/rabi.hpp"
#include "spinpair/synth.hpp"

namespace spinpair {

namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const InvalidInput*>(&e) || dynamic_cast<const Json::exception*>(&e))
    return exit_code::usage;
  if (dynamic_cast<const IoError*>(&e)) return exit_code::io;
  return exit_code::analysis;
}

// ---------------------------------------------------------------------------
// Pipeline pieces

DecayReport analyze_decay(const TransientRecord& transient, std::optional<double> min_spacing_ns,
                          double threshold_sigmas) {
  DecayReport r;
  try {
    std::vector<EnvelopePoint> points = detect_envelope_maxima(transient, min_spacing_ns);
    std::erase_if(points, [](const EnvelopePoint& p) { return !(p.q > 0.0); });
    r.n_maxima = points.size();
    if (points.size() < 2) throw NoMaxima("fewer than two positive envelope maxima");
    const ExpDecayFit fit = fit_exp_decay(points);
    r.rate_per_ns = {fit.rate, fit.rate_sigma};
    r.decay_time_ns = {fit.decay_time_ns, fit.decay_time_sigma};
    const double span = transient.tau_ns.back() - transient.tau_ns.front();
    r.detected = fit.rate > threshold_sigmas * fit.rate_sigma && fit.rate * span >= 0.05;
  } catch (const Error& e) {
    r.error = e.what();
  }
  return r;
}

TransientAnalysis transform_transient(const TransientRecord& transient, const AnalysisConfig& options) {
  TransientAnalysis a;
  a.spectrum = fft_magnitude(transient, options.window, options.pad_factor);
  a.seed = options.window == Window::Hann ? a.spectrum
                                          : fft_magnitude(transient, Window::Hann, options.pad_factor);
  return a;
}

void analyze_transient(TransientAnalysis& a, const TransientRecord& transient, const AnalysisConfig& options) {
  a.level = extract_level(a.spectrum, options.extract, &a.seed);
  std::optional<double> spacing;
  const double f_low = a.level.low.omega.value;
  if (options.maxima_spacing_fraction > 0.0 && f_low > 0.0)
    spacing = options.maxima_spacing_fraction * 1e3 / f_low;
  a.decay = analyze_decay(transient, spacing, options.threshold_sigmas);
}

// ---------------------------------------------------------------------------
// JSON

Json to_json(const Measured& m) { return {{"value", m.value}, {"sigma", m.sigma}}; }

Measured measured_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("value") || !j.contains("sigma"))
    throw ParseError("expected {\"value\", \"sigma\"}");
  auto num = [](const Json& v) {
    return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
  };
  return {num(j.at("value")), num(j.at("sigma"))};
}

Json to_json(const DecayReport& d) {
  Json j = {{"n_maxima", d.n_maxima}, {"detected", d.detected}};
  j["status"] = !d.error.empty() ? "no decay fit" : d.detected ? "decay detected" : "no decay detected";
  if (!d.error.empty()) {
    j["error"] = d.error;
  } else {
    j["decay_time_ns"] = to_json(d.decay_time_ns);
    j["rate_per_ns"] = to_json(d.rate_per_ns);
  }
  return j;
}

namespace {

Json component_json(const ComponentEstimate& c) {
  return {{"omega_MHz", to_json(c.omega)},         {"raw_omega_MHz", to_json(c.raw_omega)},
          {"width_MHz", to_json(c.width)},         {"raw_width_MHz", to_json(c.raw_width)},
          {"amplitude_au", to_json(c.amplitude)},  {"calibrated", c.calibrated}};
}

ComponentEstimate component_from_json(const Json& j) {
  ComponentEstimate c;
  c.omega = measured_from_json(j.at("omega_MHz"));
  c.raw_omega = measured_from_json(j.at("raw_omega_MHz"));
  c.width = measured_from_json(j.at("width_MHz"));
  c.raw_width = measured_from_json(j.at("raw_width_MHz"));
  c.amplitude = measured_from_json(j.at("amplitude_au"));
  c.calibrated = j.at("calibrated").get<bool>();
  return c;
}

Json error_json(const Error& e) {
  Json j = {{"error", e.what()}};
  if (auto* im = dynamic_cast<const InconsistentMeasurement*>(&e))
    j["sigmas_below_zero"] = im->sigmas_below_zero();
  return j;
}

}  // namespace

Json to_json(const RabiLevel& level) {
  Json j;
  j["b1_label"] = level.b1_label;
  j["b1_mT"] = level.b1_mT ? Json(*level.b1_mT) : Json(nullptr);
  j["baseline_au"] = level.baseline;
  j["peaks"] = Json::array();
  for (const auto& p : level.peaks) j["peaks"].push_back(component_json(p));
  return j;
}

RabiLevel level_from_json(const Json& j) {
  try {
    RabiLevel level;
    level.b1_label = j.at("b1_label").get<std::string>();
    if (j.contains("b1_mT") && !j.at("b1_mT").is_null()) level.b1_mT = j.at("b1_mT").get<double>();
    level.baseline = j.value("baseline_au", 0.0);
    for (const auto& p : j.at("peaks")) level.peaks.push_back(component_from_json(p));
    if (level.peaks.empty()) throw ParseError("level " + level.b1_label + " has no peaks");
    level.low = level.peaks.front();
    level.high = level.peaks.back();
    return level;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("component table: ") + e.what());
  }
}

RabiComponentTable component_table_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("levels") || !doc.at("levels").is_array())
    throw ParseError("component table: expected an object with a levels array");
  RabiComponentTable table;
  for (const auto& l : doc.at("levels")) table.levels.push_back(level_from_json(l));
  return table;
}

// ---------------------------------------------------------------------------
// Extraction report

Json extract_report(const Json& components, const AnalysisConfig& options) {
  const RabiComponentTable parsed = component_table_from_json(components);
  if (parsed.levels.size() != 2)
    throw InvalidInput("extract: need exactly two B1 levels, got " + std::to_string(parsed.levels.size()));
  std::vector<std::size_t> order = {0, 1};
  const auto& lv = parsed.levels;
  if (lv[0].b1_mT && lv[1].b1_mT && *lv[1].b1_mT < *lv[0].b1_mT) order = {1, 0};
  RabiComponentTable table;
  for (std::size_t i : order) table.levels.push_back(lv[i]);
  const RabiLevel& first = table.levels[0];
  const RabiLevel& second = table.levels[1];

  Json report;
  report["levels"] = {first.b1_label, second.b1_label};
  report["g"] = options.g;

  std::optional<double> xi = options.xi;
  if (xi) {
    report["xi"] = *xi;
    report["xi_source"] = "given";
  } else if (first.b1_mT && second.b1_mT && *first.b1_mT > 0.0) {
    xi = *second.b1_mT / *first.b1_mT;
    report["xi"] = *xi;
    report["xi_source"] = "b1 ratio";
  } else {
    report["xi"] = nullptr;
  }

  auto detuning = [&](const ComponentEstimate& a, const ComponentEstimate& b) -> Json {
    try {
      if (!xi) throw InvalidInput("xi unknown: give --xi or b1_mT for both levels");
      bool clipped = false;
      const Measured d = larmor_detuning_clipped(a.omega, b.omega, *xi, 1.0, &clipped);
      return {{"delta_MHz", to_json(d)},
              {"delta_mT", to_json(detuning_to_field(d, options.g))},
              {"clipped", clipped}};
    } catch (const Error& e) {
      return error_json(e);
    }
  };
  report["detuning"] = {{"L", detuning(first.low, second.low)}, {"H", detuning(first.high, second.high)}};

  try {
    report["kappa_ratio"] = to_json(kappa_ratio(table));
  } catch (const Error& e) {
    report["kappa_ratio"] = error_json(e);
  }

  report["decay_width"] = Json::array();
  for (std::size_t k = 0; k < 2; ++k) {
    const Json& raw = components.at("levels").at(order[k]);
    const RabiLevel& level = table.levels[k];
    Json entry = {{"b1_label", level.b1_label}, {"peak", "L"}};
    try {
      const Json decay = raw.value("decay", Json::object());
      if (!decay.value("detected", false)) throw DomainError("no decay detected");
      const Measured t = measured_from_json(decay.at("decay_time_ns"));
      const DecayWidthReport w = decay_width_consistency(t, level.low.width);
      entry["expected_hwhm_MHz"] = to_json(w.expected_hwhm);
      entry["width_MHz"] = to_json(w.width);
      entry["discrepancy_MHz"] = w.discrepancy;
      entry["significance"] = w.significance;
      entry["agrees"] = w.agrees;
    } catch (const Error& e) {
      entry.update(error_json(e));
    }
    report["decay_width"].push_back(entry);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Sweeps

std::vector<SweepRecord> simulate_sweeps(const SweepConfig& sweep, std::uint64_t seed) {
  const std::vector<double> grid = sweep.grid();
  const double carrier = mhz_to_rad_per_us(sweep.carrier_MHz);
  std::vector<SweepRecord> out;
  for (std::size_t i = 0; i < sweep.angles_deg.size(); ++i) {
    const double angle = sweep.angles_deg[i];
    std::vector<LorentzianPeak> peaks;
    for (const auto& p : sweep.peaks)
      peaks.push_back({resonance_field(carrier, axial_g(angle, p.g_par, p.g_perp)), p.hwhm_mT, p.amplitude_au});
    SweepRecord rec = synthesize_sweep(peaks, grid, sweep.noise_sigma_au, seed + 1000 + i);
    rec.meta.angle_deg = angle;
    rec.meta.omega_carrier = carrier;
    out.push_back(std::move(rec));
  }
  return out;
}

Json sweep_report(const std::vector<SweepRecord>& sweeps, int n_peaks, double threshold_sigmas) {
  std::set<double> angles;
  for (const auto& s : sweeps) angles.insert(s.meta.angle_deg);
  if (angles.size() < 3)
    throw ConfigError("sweep: anisotropy verdicts need at least 3 distinct angles, got " +
                      std::to_string(angles.size()));
  if (n_peaks < 1) throw ConfigError("sweep: need at least one peak");

  Json report;
  report["angles"] = Json::array();
  std::vector<AngleSeries> series(static_cast<std::size_t>(n_peaks));
  for (const auto& s : sweeps) {
    if (!(s.meta.omega_carrier > 0.0)) throw InvalidInput("sweep: carrier frequency missing");
    const LorentzianFit fit = fit_lorentzians(as_spectrum(s), n_peaks);
    std::vector<std::size_t> rank(fit.peaks.size());
    std::iota(rank.begin(), rank.end(), 0);
    std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
      return fit.peaks[a].amplitude > fit.peaks[b].amplitude;
    });
    Json entry = {{"angle_deg", s.meta.angle_deg}, {"peaks", Json::array()}};
    for (std::size_t r = 0; r < rank.size(); ++r) {
      const auto& p = fit.peaks[rank[r]];
      const auto& e = fit.errors[rank[r]];
      const Measured g = g_factor(s.meta.omega_carrier, Measured{p.center, e.center});
      series[r].push_back({s.meta.angle_deg, g});
      entry["peaks"].push_back({{"rank", r + 1},
                                {"center_mT", to_json(Measured{p.center, e.center})},
                                {"hwhm_mT", to_json(Measured{p.hwhm, e.hwhm})},
                                {"amplitude_au", to_json(Measured{p.amplitude, e.amplitude})},
                                {"g", to_json(g)}});
    }
    report["angles"].push_back(entry);
  }
  report["anisotropy"] = Json::array();
  for (std::size_t r = 0; r < series.size(); ++r) {
    const AnisotropyFit a = fit_anisotropy(series[r], threshold_sigmas);
    report["anisotropy"].push_back({{"rank", r + 1},
                                    {"g_par", to_json(a.g_par)},
                                    {"g_perp", to_json(a.g_perp)},
                                    {"difference", to_json(a.difference)},
                                    {"significance", a.significance},
                                    {"verdict", a.verdict()}});
  }
  return report;
}

// ---------------------------------------------------------------------------
// Transients

std::vector<TransientRecord> simulate_transients(const TransientConfig& t, const std::vector<double>& grid,
                                                 std::uint64_t seed) {
  std::vector<TransientRecord> out;
  for (std::size_t i = 0; i < t.levels.size(); ++i) {
    const LevelConfig& level = t.levels[i];
    const std::uint64_t s = seed + i;
    TransientRecord rec;
    switch (t.model) {
      case TransientModel::Oracle:
        rec = rabi_transient_oracle(t.pair, level.b1_mT, t.carrier(), grid, t.steady_state);
        add_gaussian_noise(rec.q, t.effective_noise(), s);
        break;
      case TransientModel::Analytic:
        rec = nutation_curve(t.regime, level.b1_mT, t.g, grid);
        for (double& q : rec.q) q *= t.line_amplitude;
        add_gaussian_noise(rec.q, t.effective_noise(), s);
        break;
      case TransientModel::Components:
        rec = synthesize_transient(t.components_at(level.b1_mT), grid, t.effective_noise(), s);
        break;
    }
    rec.meta.b1_label = level.label;
    rec.meta.b1_mT = level.b1_mT;
    rec.meta.seed = s;
    rec.meta.n_shots = t.n_shots;
    rec.meta.noise_sigma = t.effective_noise();
    out.push_back(std::move(rec));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
};

struct Context {
  std::optional<RunConfig> config;
  fs::path out_dir = ".";
  DataFormat format = DataFormat::Csv;

  std::string hash() const { return config ? config->hash() : config_hash(Json::object()); }
  const AnalysisConfig& analysis() const {
    static const AnalysisConfig defaults;
    return config ? config->analysis : defaults;
  }
};

Context make_context(const Common& c, bool config_required) {
  Context ctx;
  if (!c.config.empty()) {
    ctx.config = load_config(c.config);
    if (c.seed) ctx.config->set_seed(*c.seed);
    ctx.out_dir = ctx.config->output.dir;
    ctx.format = ctx.config->output.format;
  } else if (config_required) {
    throw ConfigError("--config is required for this command");
  }
  if (!c.out.empty()) ctx.out_dir = c.out;
  if (!c.format.empty()) ctx.format = parse_format(c.format);
  std::error_code ec;
  fs::create_directories(ctx.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + ctx.out_dir.string() + ": " + ec.message());
  return ctx;
}

void write_json(const fs::path& path, const Json& j) { atomic_write(path, j.dump(2) + "\n"); }

Sidecar sidecar(const Context& ctx, const std::string& kind, std::uint64_t seed) {
  Sidecar s;
  s.kind = kind;
  s.seed = seed;
  s.generator_version = generator_version();
  s.config_hash = ctx.hash();
  return s;
}

std::string angle_tag(double angle) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", angle);
  return buf;
}

void cmd_simulate(const Context& ctx) {
  const RunConfig& cfg = *ctx.config;
  if (!cfg.transient && !cfg.sweep) throw ConfigError("config: nothing to simulate (no transient or sweep)");
  const std::string ext = extension(ctx.format);
  if (cfg.transient) {
    for (const auto& rec : simulate_transients(*cfg.transient, cfg.grid.grid(), cfg.seed)) {
      const fs::path p = ctx.out_dir / ("transient_" + rec.meta.b1_label + ext);
      write_transient(p, rec, ctx.format, sidecar(ctx, "transient", rec.meta.seed));
      std::cout << "wrote " << p.string() << "\n";
    }
  }
  if (cfg.sweep) {
    if (!cfg.sweep->files.empty()) throw ConfigError("sweep.files: measured sweeps cannot be simulated");
    for (const auto& rec : simulate_sweeps(*cfg.sweep, cfg.seed)) {
      const fs::path p = ctx.out_dir / ("sweep_" + angle_tag(rec.meta.angle_deg) + "deg" + ext);
      write_sweep(p, rec, ctx.format, sidecar(ctx, "sweep", rec.meta.seed));
      std::cout << "wrote " << p.string() << "\n";
    }
  }
  write_json(ctx.out_dir / "config.json", cfg.document);
}

void cmd_analyze(const Context& ctx, const std::vector<std::string>& inputs) {
  const AnalysisConfig& opts = ctx.analysis();
  std::vector<TransientRecord> transients;
  std::set<std::string> labels;
  for (const auto& in : inputs) {
    transients.push_back(read_transient(in));
    if (!labels.insert(transients.back().meta.b1_label).second)
      throw InvalidInput("analyze: duplicate level label " + transients.back().meta.b1_label);
  }
  // Spectra first so that a failed fit leaves them behind for inspection.
  std::vector<TransientAnalysis> analyses;
  for (const auto& t : transients) {
    analyses.push_back(transform_transient(t, opts));
    const fs::path p = ctx.out_dir / ("spectrum_" + t.meta.b1_label + extension(ctx.format));
    write_spectrum(p, analyses.back().spectrum, ctx.format, sidecar(ctx, "spectrum", t.meta.seed));
    std::cout << "wrote " << p.string() << "\n";
  }
  Json doc;
  doc["generator_version"] = generator_version();
  doc["config_hash"] = ctx.hash();
  doc["levels"] = Json::array();
  for (std::size_t i = 0; i < transients.size(); ++i) {
    try {
      analyze_transient(analyses[i], transients[i], opts);
    } catch (const Error& e) {
      throw InitializationError("analyze " + transients[i].meta.b1_label + ": " + e.what() +
                                " (spectrum written for inspection)");
    }
    Json level = to_json(analyses[i].level);
    level["decay"] = to_json(analyses[i].decay);
    doc["levels"].push_back(level);
    const RabiLevel& l = analyses[i].level;
    std::cout << l.b1_label << ": L " << l.low.omega.value << " +/- " << l.low.omega.sigma << " MHz, H "
              << l.high.omega.value << " +/- " << l.high.omega.sigma << " MHz, "
              << level["decay"]["status"].get<std::string>() << "\n";
  }
  const fs::path p = ctx.out_dir / "components.json";
  write_json(p, doc);
  std::cout << "wrote " << p.string() << "\n";
}

void cmd_extract(const Context& ctx, const std::string& input, std::optional<double> xi) {
  AnalysisConfig opts = ctx.analysis();
  if (xi) {
    if (!(*xi > 1.0)) throw InvalidInput("--xi must exceed 1");
    opts.xi = xi;
  }
  Json components;
  try {
    components = Json::parse(read_file(input));
  } catch (const Json::parse_error& e) {
    throw ParseError(input + ": malformed JSON");
  }
  Json report = extract_report(components, opts);
  report["generator_version"] = generator_version();
  const fs::path p = ctx.out_dir / "extract.json";
  write_json(p, report);
  std::cout << report.dump(2) << "\n";
}

void cmd_sweep(const Context& ctx) {
  const RunConfig& cfg = *ctx.config;
  if (!cfg.sweep) throw ConfigError("config: sweep section required");
  const SweepConfig& sw = *cfg.sweep;
  std::vector<SweepRecord> sweeps;
  int n_peaks = cfg.analysis.extract.k_peaks;
  if (!sw.files.empty()) {
    for (const auto& f : sw.files) {
      SweepRecord rec = read_sweep(f.path);
      rec.meta.angle_deg = f.angle_deg;
      rec.meta.omega_carrier = mhz_to_rad_per_us(sw.carrier_MHz);
      sweeps.push_back(std::move(rec));
    }
    if (!sw.peaks.empty()) n_peaks = static_cast<int>(sw.peaks.size());
  } else {
    std::set<double> distinct(sw.angles_deg.begin(), sw.angles_deg.end());
    if (distinct.size() < 3)
      throw ConfigError("sweep.angles_deg: anisotropy verdicts need at least 3 distinct angles");
    sweeps = simulate_sweeps(sw, cfg.seed);
    n_peaks = static_cast<int>(sw.peaks.size());
    for (const auto& rec : sweeps) {
      const fs::path p = ctx.out_dir / ("sweep_" + angle_tag(rec.meta.angle_deg) + "deg" + extension(ctx.format));
      write_sweep(p, rec, ctx.format, sidecar(ctx, "sweep", rec.meta.seed));
    }
  }
  Json report = sweep_report(sweeps, n_peaks, cfg.analysis.threshold_sigmas);
  report["generator_version"] = generator_version();
  report["config_hash"] = ctx.hash();
  const fs::path p = ctx.out_dir / "sweep_report.json";
  write_json(p, report);
  for (const auto& a : report["anisotropy"])
    std::cout << "peak " << a["rank"].get<int>() << ": " << a["verdict"].get<std::string>() << " ("
              << a["significance"].get<double>() << " sigma)\n";
  std::cout << "wrote " << p.string() << "\n";
}

void cmd_oracle_compare(const Common& c, int n_detunings, int n_tau) {
  EquivalenceSetup setup = EquivalenceSetup::weak_coupling();
  setup.n_detunings = n_detunings;
  setup.n_tau = n_tau;
  const EquivalenceResult r = oracle_equivalence(setup);
  std::cout << "max_deviation " << r.comparison.max_deviation << "\n";
  if (!c.out.empty()) {
    Context ctx = make_context(Common{"", std::nullopt, c.out, "json"}, false);
    Json j = {{"max_deviation", r.comparison.max_deviation},
              {"scale", r.comparison.scale},
              {"tau_ns", r.tau_ns},
              {"analytic", r.analytic},
              {"oracle", r.oracle}};
    write_json(ctx.out_dir / "oracle_compare.json", j);
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Spin-pair pulsed EDMR simulation and analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(generator_version()));

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Run configuration (JSON)");
    sub->add_option("--seed", common.seed, "Seed; overrides the configuration");
    sub->add_option("--out", common.out, "Output directory");
    sub->add_option("--format", common.format, "Data format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* simulate = app.add_subcommand("simulate", "Write synthetic transients and field sweeps");
  add_common(simulate);

  std::vector<std::string> inputs;
  auto* analyze = app.add_subcommand("analyze", "Spectra, Rabi components and decay of transients");
  add_common(analyze);
  analyze->add_option("inputs", inputs, "Transient files")->required();

  std::string components;
  std::optional<double> xi;
  auto* extract = app.add_subcommand("extract", "Detuning, kappa ratio and width consistency");
  add_common(extract);
  extract->add_option("components", components, "components.json from analyze")->required();
  extract->add_option("--xi", xi, "B1 ratio of the two levels");

  auto* sweep = app.add_subcommand("sweep", "Per-angle field-sweep fits and anisotropy verdicts");
  add_common(sweep);

  int n_detunings = 401;
  int n_tau = 50;
  auto* oracle = app.add_subcommand("oracle-compare", "Analytic ensemble transient against the exact oracle");
  add_common(oracle);
  oracle->add_option("--detunings", n_detunings, "Detuning samples")->check(CLI::Range(3, 100000));
  oracle->add_option("--tau-points", n_tau, "Pulse lengths")->check(CLI::Range(2, 100000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_code::ok : exit_code::usage;
  }

  try {
    if (simulate->parsed()) cmd_simulate(make_context(common, true));
    else if (analyze->parsed()) cmd_analyze(make_context(common, false), inputs);
    else if (extract->parsed()) cmd_extract(make_context(common, false), components, xi);
    else if (sweep->parsed()) cmd_sweep(make_context(common, true));
    else if (oracle->parsed()) cmd_oracle_compare(common, n_detunings, n_tau);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return exit_code::ok;
}

}  // namespace spinpair
