#include "spinpair/config.hpp"

#include <cmath>
#include <set>

#include "spinpair/constants.hpp"
#include "spinpair/errors.hpp"

namespace spinpair {

namespace {

// Strict view of one JSON object: every key must be consumed by a getter
// before finish(), which rejects the rest.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const Json* raw(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  std::optional<double> number(const std::string& key) {
    const Json* v = raw(key);
    if (!v || v->is_null()) return std::nullopt;
    if (!v->is_number()) throw ConfigError(key_path(key) + ": expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) throw ConfigError(key_path(key) + ": must be finite");
    return d;
  }

  double number(const std::string& key, double fallback) { return number(key).value_or(fallback); }

  double required(const std::string& key) {
    const auto v = number(key);
    if (!v) throw ConfigError(key_path(key) + ": required");
    return *v;
  }

  std::optional<std::int64_t> integer(const std::string& key) {
    const Json* v = raw(key);
    if (!v || v->is_null()) return std::nullopt;
    if (!v->is_number_integer()) throw ConfigError(key_path(key) + ": expected an integer");
    return v->get<std::int64_t>();
  }

  std::optional<std::string> string(const std::string& key) {
    const Json* v = raw(key);
    if (!v || v->is_null()) return std::nullopt;
    if (!v->is_string()) throw ConfigError(key_path(key) + ": expected a string");
    return v->get<std::string>();
  }

  std::optional<bool> boolean(const std::string& key) {
    const Json* v = raw(key);
    if (!v || v->is_null()) return std::nullopt;
    if (!v->is_boolean()) throw ConfigError(key_path(key) + ": expected true or false");
    return v->get<bool>();
  }

  const Json* array(const std::string& key) {
    const Json* v = raw(key);
    if (!v || v->is_null()) return nullptr;
    if (!v->is_array()) throw ConfigError(key_path(key) + ": expected an array");
    return v;
  }

  std::vector<double> numbers(const std::string& key) {
    std::vector<double> out;
    if (const Json* a = array(key)) {
      for (std::size_t i = 0; i < a->size(); ++i) {
        const Json& e = (*a)[i];
        if (!e.is_number() || !std::isfinite(e.get<double>()))
          throw ConfigError(key_path(key) + "[" + std::to_string(i) + "]: expected a finite number");
        out.push_back(e.get<double>());
      }
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(key_path(it.key()) + ": unknown key");
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void positive(double v, const std::string& path) {
  if (!(v > 0.0)) throw ConfigError(path + ": must be positive");
}

void non_negative(double v, const std::string& path) {
  if (!(v >= 0.0)) throw ConfigError(path + ": must be non-negative");
}

std::string index_path(const Section& s, const std::string& key, std::size_t i) {
  return s.key_path(key) + "[" + std::to_string(i) + "]";
}

GridConfig parse_grid(const Json& j, const std::string& path) {
  Section s(j, path);
  GridConfig g;
  g.tau_start_ns = s.number("tau_start_ns", g.tau_start_ns);
  g.tau_stop_ns = s.number("tau_stop_ns", g.tau_stop_ns);
  g.tau_step_ns = s.number("tau_step_ns", g.tau_step_ns);
  s.finish();
  non_negative(g.tau_start_ns, s.key_path("tau_start_ns"));
  positive(g.tau_step_ns, s.key_path("tau_step_ns"));
  if (!(g.tau_stop_ns > g.tau_start_ns)) throw ConfigError(s.key_path("tau_stop_ns") + ": must exceed tau_start_ns");
  return g;
}

CouplingRegime parse_regime(const std::string& name, const std::string& path) {
  if (name == "weak") return CouplingRegime::WeakSelective;
  if (name == "strong") return CouplingRegime::StrongUnselective;
  if (name == "strong_small_b1") return CouplingRegime::StrongSmallB1;
  throw ConfigError(path + ": expected weak, strong or strong_small_b1");
}

ComponentConfig parse_component(const Json& j, const std::string& path) {
  Section s(j, path);
  ComponentConfig c;
  c.omega_MHz = s.number("omega_MHz");
  c.kappa = s.number("kappa");
  c.g = s.number("g");
  c.detuning_MHz = s.number("detuning_MHz", c.detuning_MHz);
  c.amplitude_au = s.number("amplitude_au", c.amplitude_au);
  c.decay_ns = s.number("decay_ns", c.decay_ns);  // null or absent: undamped
  c.phase_rad = s.number("phase_rad", c.phase_rad);
  s.finish();
  if (c.omega_MHz.has_value() == c.kappa.has_value())
    throw ConfigError(path + ": give exactly one of omega_MHz and kappa");
  if (c.omega_MHz) non_negative(*c.omega_MHz, s.key_path("omega_MHz"));
  if (c.kappa) positive(*c.kappa, s.key_path("kappa"));
  if (c.g) positive(*c.g, s.key_path("g"));
  positive(c.decay_ns, s.key_path("decay_ns"));
  return c;
}

TransientConfig parse_transient(const Json& j, const std::string& path) {
  Section s(j, path);
  TransientConfig t;
  const std::string model = s.string("model").value_or("components");
  if (model == "oracle") t.model = TransientModel::Oracle;
  else if (model == "analytic") t.model = TransientModel::Analytic;
  else if (model == "components") t.model = TransientModel::Components;
  else throw ConfigError(s.key_path("model") + ": expected oracle, analytic or components");

  if (const Json* sp = s.raw("spin_pair"); sp && !sp->is_null()) {
    Section p(*sp, s.key_path("spin_pair"));
    t.pair.g_a = p.number("g_a", t.pair.g_a);
    t.pair.g_b = p.number("g_b", t.pair.g_b);
    t.pair.exchange = mhz_to_rad_per_us(p.number("J_MHz", 0.0));
    t.pair.dipolar = mhz_to_rad_per_us(p.number("Dd_MHz", 0.0));
    t.pair.b0 = p.number("B0_mT", 0.0);
    p.finish();
    positive(t.pair.g_a, p.key_path("g_a"));
    positive(t.pair.g_b, p.key_path("g_b"));
    non_negative(t.pair.b0, p.key_path("B0_mT"));
  } else if (t.model == TransientModel::Oracle) {
    throw ConfigError(s.key_path("spin_pair") + ": required for the oracle model");
  }

  const std::vector<double> pops = s.numbers("steady_state");
  if (!pops.empty()) {
    if (pops.size() != 4) throw ConfigError(s.key_path("steady_state") + ": expected 4 populations");
    t.steady_state = SteadyStateModel::custom({pops[0], pops[1], pops[2], pops[3]});
  }

  if (const Json* c = s.raw("carrier"); c && !c->is_null()) {
    Section cs(*c, s.key_path("carrier"));
    if (auto r = cs.string("resonant_with")) t.resonant_with = *r;
    t.carrier_MHz = cs.number("frequency_MHz");
    cs.finish();
    if (t.resonant_with != "a" && t.resonant_with != "b" && t.resonant_with != "center")
      throw ConfigError(cs.key_path("resonant_with") + ": expected a, b or center");
  }

  if (auto r = s.string("regime")) t.regime = parse_regime(*r, s.key_path("regime"));
  t.g = s.number("g", t.g);
  positive(t.g, s.key_path("g"));
  t.line_amplitude = s.number("line_amplitude_au", t.line_amplitude);

  if (const Json* levels = s.array("levels")) {
    for (std::size_t i = 0; i < levels->size(); ++i) {
      Section l((*levels)[i], index_path(s, "levels", i));
      LevelConfig lc;
      lc.b1_mT = l.required("b1_mT");
      lc.label = l.string("label").value_or("B1_" + std::to_string(i + 1));
      l.finish();
      non_negative(lc.b1_mT, l.key_path("b1_mT"));
      if (lc.label.empty() || lc.label.find_first_of("/\\") != std::string::npos)
        throw ConfigError(l.key_path("label") + ": must be a plain file-name fragment");
      t.levels.push_back(lc);
    }
  }
  if (t.levels.empty()) throw ConfigError(s.key_path("levels") + ": at least one level required");
  std::set<std::string> labels;
  for (const auto& l : t.levels)
    if (!labels.insert(l.label).second) throw ConfigError(s.key_path("levels") + ": duplicate label " + l.label);

  if (const Json* comps = s.array("components"))
    for (std::size_t i = 0; i < comps->size(); ++i)
      t.components.push_back(parse_component((*comps)[i], index_path(s, "components", i)));
  if (t.model == TransientModel::Components && t.components.empty())
    throw ConfigError(s.key_path("components") + ": required for the components model");

  t.noise_sigma_au = s.number("noise_sigma_au", t.noise_sigma_au);
  non_negative(t.noise_sigma_au, s.key_path("noise_sigma_au"));
  const auto shots = s.integer("n_shots");
  t.n_shots = static_cast<int>(shots.value_or(1));
  if (shots && *shots < 1) throw ConfigError(s.key_path("n_shots") + ": must be at least 1");
  s.finish();
  return t;
}

SweepConfig parse_sweep(const Json& j, const std::string& path) {
  Section s(j, path);
  SweepConfig w;
  w.b0_start_mT = s.number("b0_start_mT", 0.0);
  w.b0_stop_mT = s.number("b0_stop_mT", 0.0);
  w.b0_step_mT = s.number("b0_step_mT", 0.0);
  w.carrier_MHz = s.required("carrier_MHz");
  positive(w.carrier_MHz, s.key_path("carrier_MHz"));
  w.noise_sigma_au = s.number("noise_sigma_au", 0.0);
  non_negative(w.noise_sigma_au, s.key_path("noise_sigma_au"));
  w.angles_deg = s.numbers("angles_deg");
  for (double a : w.angles_deg)
    if (a < 0.0 || a > 90.0) throw ConfigError(s.key_path("angles_deg") + ": angles must lie in [0, 90]");
  if (const Json* peaks = s.array("peaks")) {
    for (std::size_t i = 0; i < peaks->size(); ++i) {
      Section p((*peaks)[i], index_path(s, "peaks", i));
      SweepPeakConfig pc;
      pc.g_par = p.required("g_par");
      pc.g_perp = p.required("g_perp");
      pc.hwhm_mT = p.required("hwhm_mT");
      pc.amplitude_au = p.number("amplitude_au", 1.0);
      p.finish();
      positive(pc.g_par, p.key_path("g_par"));
      positive(pc.g_perp, p.key_path("g_perp"));
      positive(pc.hwhm_mT, p.key_path("hwhm_mT"));
      w.peaks.push_back(pc);
    }
  }
  if (const Json* files = s.array("files")) {
    for (std::size_t i = 0; i < files->size(); ++i) {
      Section f((*files)[i], index_path(s, "files", i));
      SweepFileConfig fc;
      fc.angle_deg = f.required("angle_deg");
      fc.path = f.string("path").value_or("");
      f.finish();
      if (fc.path.empty()) throw ConfigError(f.key_path("path") + ": required");
      if (fc.angle_deg < 0.0 || fc.angle_deg > 90.0)
        throw ConfigError(f.key_path("angle_deg") + ": must lie in [0, 90]");
      w.files.push_back(fc);
    }
  }
  s.finish();
  if (w.files.empty()) {
    if (w.peaks.empty()) throw ConfigError(s.key_path("peaks") + ": required unless files are given");
    if (w.angles_deg.empty()) throw ConfigError(s.key_path("angles_deg") + ": required unless files are given");
    positive(w.b0_step_mT, s.key_path("b0_step_mT"));
    if (!(w.b0_stop_mT > w.b0_start_mT)) throw ConfigError(s.key_path("b0_stop_mT") + ": must exceed b0_start_mT");
  }
  return w;
}

AnalysisConfig parse_analysis(const Json& j, const std::string& path) {
  Section s(j, path);
  AnalysisConfig a;
  if (auto w = s.string("window")) {
    if (*w == "rect") a.window = Window::Rectangular;
    else if (*w == "hann") a.window = Window::Hann;
    else throw ConfigError(s.key_path("window") + ": expected rect or hann");
  }
  if (auto p = s.integer("pad_factor")) {
    if (*p < 1 || *p > 64) throw ConfigError(s.key_path("pad_factor") + ": expected 1..64");
    a.pad_factor = static_cast<int>(*p);
  }
  if (auto k = s.integer("k_peaks")) {
    if (*k < 1 || *k > 8) throw ConfigError(s.key_path("k_peaks") + ": expected 1..8");
    a.extract.k_peaks = static_cast<int>(*k);
  }
  a.extract.min_freq_MHz = s.number("min_freq_MHz", a.extract.min_freq_MHz);
  non_negative(a.extract.min_freq_MHz, s.key_path("min_freq_MHz"));
  a.extract.max_freq_MHz = s.number("max_freq_MHz");
  if (a.extract.max_freq_MHz && !(*a.extract.max_freq_MHz > a.extract.min_freq_MHz))
    throw ConfigError(s.key_path("max_freq_MHz") + ": must exceed min_freq_MHz");
  a.extract.calibrate_widths = s.boolean("calibrate_widths").value_or(true);
  a.extract.min_relative_prominence = s.number("min_relative_prominence", a.extract.min_relative_prominence);
  if (a.extract.min_relative_prominence < 0.0 || a.extract.min_relative_prominence >= 1.0)
    throw ConfigError(s.key_path("min_relative_prominence") + ": expected [0, 1)");
  a.xi = s.number("xi");
  if (a.xi && !(*a.xi > 1.0)) throw ConfigError(s.key_path("xi") + ": must exceed 1");
  a.g = s.number("g", a.g);
  positive(a.g, s.key_path("g"));
  a.threshold_sigmas = s.number("threshold_sigmas", a.threshold_sigmas);
  positive(a.threshold_sigmas, s.key_path("threshold_sigmas"));
  a.maxima_spacing_fraction = s.number("maxima_spacing_fraction", a.maxima_spacing_fraction);
  non_negative(a.maxima_spacing_fraction, s.key_path("maxima_spacing_fraction"));
  s.finish();
  return a;
}

}  // namespace

std::vector<double> GridConfig::grid() const { return uniform_grid(tau_start_ns, tau_stop_ns, tau_step_ns); }

std::vector<double> SweepConfig::grid() const { return uniform_grid(b0_start_mT, b0_stop_mT, b0_step_mT); }

double TransientConfig::carrier() const {
  if (carrier_MHz) return mhz_to_rad_per_us(*carrier_MHz);
  if (resonant_with == "b") return pair.larmor_b();
  if (resonant_with == "center") return 0.5 * (pair.larmor_a() + pair.larmor_b());
  return pair.larmor_a();
}

std::vector<OscComponent> TransientConfig::components_at(double b1_mT) const {
  std::vector<OscComponent> out;
  for (const auto& c : components) {
    OscComponent o;
    if (c.omega_MHz) {
      o.omega = mhz_to_rad_per_us(*c.omega_MHz);
    } else {
      o.omega = rabi_frequency(*c.kappa, b1_mT, c.g.value_or(g), mhz_to_rad_per_us(c.detuning_MHz));
    }
    o.amplitude = c.amplitude_au;
    o.decay_time_ns = c.decay_ns;
    o.phase = c.phase_rad;
    out.push_back(o);
  }
  return out;
}

double TransientConfig::effective_noise() const { return noise_sigma_au / std::sqrt(static_cast<double>(n_shots)); }

void RunConfig::set_seed(std::uint64_t s) {
  seed = s;
  document["seed"] = s;
}

RunConfig parse_config(const Json& doc) {
  Section s(doc, "");
  RunConfig cfg;
  cfg.document = doc;
  if (const Json* seed = s.raw("seed"); seed && !seed->is_null()) {
    if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<std::int64_t>() >= 0))
      throw ConfigError("seed: expected a non-negative integer");
    cfg.seed = seed->get<std::uint64_t>();
  }
  if (const Json* o = s.raw("output"); o && !o->is_null()) {
    Section os(*o, "output");
    cfg.output.dir = os.string("dir").value_or(cfg.output.dir);
    if (auto f = os.string("format")) {
      try {
        cfg.output.format = parse_format(*f);
      } catch (const ConfigError&) {
        throw ConfigError("output.format: expected csv or json");
      }
    }
    os.finish();
  }
  if (const Json* g = s.raw("grid"); g && !g->is_null()) cfg.grid = parse_grid(*g, "grid");
  if (const Json* t = s.raw("transient"); t && !t->is_null()) cfg.transient = parse_transient(*t, "transient");
  if (const Json* w = s.raw("sweep"); w && !w->is_null()) cfg.sweep = parse_sweep(*w, "sweep");
  if (const Json* a = s.raw("analysis"); a && !a->is_null()) cfg.analysis = parse_analysis(*a, "analysis");
  s.finish();
  return cfg;
}

RunConfig parse_config_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError("config line " + std::to_string(line) + ", column " + std::to_string(column) +
                     ": malformed JSON");
  }
  return parse_config(doc);
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config_text(read_file(path));
}

}  // namespace spinpair
