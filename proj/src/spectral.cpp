#include "spinpair/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>

#include "spinpair/constants.hpp"
#include "spinpair/errors.hpp"
#include "spinpair/synth.hpp"

namespace spinpair {

namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double uniform_step(const std::vector<double>& t) {
  if (t.size() < 2) throw InvalidInput("fft_magnitude: need at least 2 samples");
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i)
    if (std::abs((t[i] - t[i - 1]) - dt) > 1e-6 * dt)
      throw InvalidInput("fft_magnitude: grid is not uniform");
  return dt;
}

double record_length_us(const SpectrumSource& s) {
  return ns_to_us(static_cast<double>(s.n_samples) * s.dt_ns);
}

double value_near(const SpectrumRecord& s, double x) {
  const auto it = std::lower_bound(s.x.begin(), s.x.end(), x);
  std::size_t i = static_cast<std::size_t>(it - s.x.begin());
  if (i == s.x.size()) --i;
  if (i > 0 && std::abs(s.x[i - 1] - x) < std::abs(s.x[i] - x)) --i;
  return s.y[i];
}

double median_in_range(const SpectrumRecord& s, double lo, double hi) {
  std::vector<double> v;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.x[i] >= lo && s.x[i] <= hi) v.push_back(s.y[i]);
  if (v.empty()) return 0.0;
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

Measured guarded(double value, double sigma) {
  return {value, std::max(sigma, 1e-12 * std::max(std::abs(value), 1.0))};
}

}  // namespace

SpectrumRecord fft_magnitude(const TransientRecord& transient, Window window, int zero_pad_factor) {
  transient.validate();
  if (zero_pad_factor < 1) throw InvalidInput("fft_magnitude: zero-pad factor must be >= 1");
  const double dt = uniform_step(transient.tau_ns);
  const std::size_t n = transient.size();
  const std::size_t padded = n * static_cast<std::size_t>(zero_pad_factor);

  double mean = 0.0;
  for (double v : transient.q) mean += v;
  mean /= static_cast<double>(n);

  double* in = fftw_alloc_real(padded);
  fftw_complex* out = fftw_alloc_complex(padded / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(padded), in, out, FFTW_ESTIMATE);
  }
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < padded; ++i) in[i] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = 1.0;
    if (window == Window::Hann && n > 1)
      w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n - 1)));
    weight_sum += w;
    in[i] = (transient.q[i] - mean) * w;
  }
  fftw_execute(plan);

  SpectrumRecord spec;
  spec.label = transient.meta.b1_label;
  spec.b1_mT = transient.meta.b1_mT;
  spec.source = SpectrumSource{n, transient.tau_ns.front(), dt, zero_pad_factor, window};
  const std::size_t bins = padded / 2 + 1;
  spec.x.resize(bins);
  spec.y.resize(bins);
  const double df = 1e3 / (static_cast<double>(padded) * dt);
  for (std::size_t k = 0; k < bins; ++k) {
    spec.x[k] = static_cast<double>(k) * df;
    spec.y[k] = 2.0 * std::hypot(out[k][0], out[k][1]) / weight_sum;
  }
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return spec;
}

double dominant_frequency(const SpectrumRecord& spectrum, double min_x) {
  spectrum.validate();
  std::size_t best = spectrum.size();
  for (std::size_t i = 0; i < spectrum.size(); ++i)
    if (spectrum.x[i] >= min_x && (best == spectrum.size() || spectrum.y[i] > spectrum.y[best]))
      best = i;
  if (best == spectrum.size()) throw InvalidInput("dominant_frequency: no points above min_x");
  if (best == 0 || best + 1 == spectrum.size()) return spectrum.x[best];
  const double a = spectrum.y[best - 1], b = spectrum.y[best], c = spectrum.y[best + 1];
  const double curvature = a - 2.0 * b + c;
  if (curvature >= 0.0) return spectrum.x[best];
  const double offset = std::clamp(0.5 * (a - c) / curvature, -0.5, 0.5);
  return spectrum.x[best] + offset * (spectrum.x[best + 1] - spectrum.x[best]);
}

std::vector<LorentzianPeak> seed_peaks(const SpectrumRecord& spectrum,
                                       const SpectrumRecord* seed_spectrum,
                                       const ExtractOptions& options) {
  const SpectrumRecord& s = seed_spectrum ? *seed_spectrum : spectrum;
  const double hi = options.max_freq_MHz.value_or(std::numeric_limits<double>::infinity());
  std::vector<double> x, y;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.x[i] >= options.min_freq_MHz && s.x[i] <= hi) {
      x.push_back(s.x[i]);
      y.push_back(s.y[i]);
    }
  const auto candidates = find_peaks(x, y);
  if (candidates.empty()) throw InitializationError("no spectral maxima in the analysis range");

  double exclusion = 0.0;
  if (s.source) {
    const double lobe = 1.0 / record_length_us(*s.source);
    exclusion = (s.source->window == Window::Hann ? 2.0 : 1.0) * lobe;
  }
  const double floor = options.min_relative_prominence * candidates.front().prominence;
  const double base = median_in_range(spectrum, options.min_freq_MHz, hi);
  std::vector<LorentzianPeak> seeds;
  for (const auto& c : candidates) {
    if (seeds.size() == static_cast<std::size_t>(options.k_peaks)) break;
    if (c.prominence < floor) break;
    const double center = x[c.index];
    const bool in_lobe = std::any_of(seeds.begin(), seeds.end(), [&](const LorentzianPeak& p) {
      return std::abs(p.center - center) <= exclusion;
    });
    if (in_lobe) continue;
    const double dx = x.size() > 1 ? x[1] - x[0] : 1.0;
    seeds.push_back({center, std::max(c.half_width, dx),
                     std::max(value_near(spectrum, center) - base, 0.5 * c.prominence)});
  }
  if (seeds.size() < static_cast<std::size_t>(options.k_peaks))
    throw InitializationError("only " + std::to_string(seeds.size()) + " resolvable peak(s), need " +
                              std::to_string(options.k_peaks));
  return seeds;
}

double rice_mean(double magnitude, double scale) {
  if (scale <= 0.0) return std::abs(magnitude);
  const double u = magnitude * magnitude / (2.0 * scale * scale);
  if (u > 50.0) {
    const double nu = std::abs(magnitude);
    return nu + scale * scale / (2.0 * nu);
  }
  // s sqrt(pi/2) L_{1/2}(-u) with L_{1/2}(-u) = e^{-u/2}((1+u) I0(u/2) + u I1(u/2)).
  const double half = 0.5 * u;
  const double laguerre =
      std::exp(-half) * ((1.0 + u) * std::cyl_bessel_i(0.0, half) + u * std::cyl_bessel_i(1.0, half));
  return scale * std::sqrt(0.5 * std::numbers::pi) * laguerre;
}

namespace {

std::vector<double> source_grid(const SpectrumSource& source) {
  std::vector<double> tau(source.n_samples);
  for (std::size_t i = 0; i < tau.size(); ++i)
    tau[i] = source.tau_start_ns + static_cast<double>(i) * source.dt_ns;
  return tau;
}

// Noiseless magnitude spectrum of damped (1 - cos) components with
// parameters (center MHz, hwhm MHz, amplitude) per component.
SpectrumRecord component_spectrum(const Eigen::VectorXd& theta, const SpectrumSource& source,
                                  const std::vector<double>& tau) {
  std::vector<OscComponent> comps;
  for (Eigen::Index p = 0; p < theta.size() / 3; ++p)
    comps.push_back({mhz_to_rad_per_us(theta(3 * p)), theta(3 * p + 2),
                     us_to_ns(1.0 / (2.0 * std::numbers::pi * theta(3 * p + 1))), 0.0});
  return fft_magnitude(synthesize_transient(comps, tau, 0.0, 0), source.window, source.pad_factor);
}

// E|m + n|^2 = m^2 + 2 s^2 over bins in the fit range away from the peaks.
double noise_scale_from_floor(const SpectrumRecord& observed, const SpectrumRecord& model,
                              const std::vector<LorentzianPeak>& peaks,
                              const LorentzianFitOptions& range) {
  const double guard = 3.0 / record_length_us(*observed.source);
  const double lo = range.x_min.value_or(-std::numeric_limits<double>::infinity());
  const double hi = range.x_max.value_or(std::numeric_limits<double>::infinity());
  double excess = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double x = observed.x[i];
    if (x < lo || x > hi) continue;
    const bool near_peak = std::any_of(peaks.begin(), peaks.end(), [&](const LorentzianPeak& p) {
      return std::abs(x - p.center) < 10.0 * p.hwhm + guard;
    });
    if (near_peak) continue;
    excess += observed.y[i] * observed.y[i] - model.y[i] * model.y[i];
    ++count;
  }
  if (count < 20 || excess <= 0.0) return 0.0;
  return std::sqrt(0.5 * excess / static_cast<double>(count));
}

}  // namespace

WidthCalibration calibrate_widths(const LorentzianFit& observed, const SpectrumRecord& spectrum,
                                  const LorentzianFitOptions& range) {
  const int k = static_cast<int>(observed.peaks.size());
  if (k < 1) throw InvalidInput("calibrate_widths: no peaks");
  if (!spectrum.source) throw InvalidInput("calibrate_widths: spectrum has no source description");
  const SpectrumSource& source = *spectrum.source;
  const std::vector<double> tau = source_grid(source);

  Eigen::VectorXd target(3 * k), scale(3 * k);
  for (int p = 0; p < k; ++p) {
    const auto& pk = observed.peaks[p];
    const auto& er = observed.errors[p];
    const double v[3] = {pk.center, pk.hwhm, pk.amplitude};
    const double e[3] = {er.center, er.hwhm, er.amplitude};
    for (int j = 0; j < 3; ++j) {
      target(3 * p + j) = v[j];
      scale(3 * p + j) = guarded(v[j], e[j]).sigma;
    }
  }

  LorentzianFitOptions inner = range;
  inner.init = observed.peaks;
  inner.sigma.reset();
  double noise = 0.0;
  auto residuals = [&](const Eigen::VectorXd& theta) -> Eigen::VectorXd {
    try {
      SpectrumRecord model = component_spectrum(theta, source, tau);
      for (double& v : model.y) v = rice_mean(v, noise);
      const auto fit = fit_lorentzians(model, k, inner);
      Eigen::VectorXd r(3 * k);
      for (int p = 0; p < k; ++p) {
        r(3 * p) = fit.peaks[p].center;
        r(3 * p + 1) = fit.peaks[p].hwhm;
        r(3 * p + 2) = fit.peaks[p].amplitude;
      }
      return (r - target).cwiseQuotient(scale);
    } catch (const Error&) {
      return Eigen::VectorXd::Constant(3 * k, std::numeric_limits<double>::quiet_NaN());
    }
  };

  const double instrumental = (source.window == Window::Hann ? 1.0 : 0.5) / record_length_us(source);
  Eigen::VectorXd theta(3 * k);
  for (int p = 0; p < k; ++p) {
    const auto& pk = observed.peaks[p];
    const double gamma = std::max(pk.hwhm - instrumental, 0.1 * pk.hwhm);
    double mean_env = 0.0;
    for (double t : tau) mean_env += std::exp(-2.0 * std::numbers::pi * gamma * ns_to_us(t));
    mean_env /= static_cast<double>(tau.size());
    theta(3 * p) = pk.center;
    theta(3 * p + 1) = gamma;
    theta(3 * p + 2) = pk.amplitude / mean_env;
  }

  LsqOptions lsq;
  lsq.absolute_sigma = true;
  lsq.fd_rel_step = 1e-4;
  lsq.chi2_tol = 1e-12;
  lsq.max_iter = 50;
  lsq.lower = Eigen::VectorXd::Zero(3 * k);
  for (int p = 0; p < k; ++p) (*lsq.lower)(3 * p + 1) = 1e-6;

  WidthCalibration out;
  // The noise floor is re-estimated against the current model, then the
  // components are refined under it.
  for (int pass = 0; pass < 3; ++pass) {
    out.fit = solve_damped_lsq(residuals, theta, lsq);
    theta = out.fit.params;
    if (pass == 2) break;
    noise = noise_scale_from_floor(spectrum, component_spectrum(theta, source, tau),
                                   observed.peaks, range);
  }
  out.noise_scale = noise;

  // d(fitted)/d(theta), mapping the observed covariance back to theta.
  const Eigen::MatrixXd jf = scale.asDiagonal() * out.fit.jacobian;
  const Eigen::MatrixXd ji = jf.completeOrthogonalDecomposition().pseudoInverse();
  Eigen::MatrixXd cov = ji * observed.peak_covariance * ji.transpose();
  cov = 0.5 * (cov + cov.transpose());
  out.fit.covariance = cov;
  // A peak counts as reproduced when its fitted triple is matched well inside
  // its uncertainty and its rate is off the lower bound.
  const Eigen::VectorXd r = residuals(theta);
  for (int p = 0; p < k; ++p)
    out.reproduced.push_back(r.segment(3 * p, 3).allFinite() &&
                             r.segment(3 * p, 3).cwiseAbs().maxCoeff() <= 0.05 &&
                             theta(3 * p + 1) > 1e-5);
  auto entry = [&](int i) { return Measured{out.fit.params(i), std::sqrt(std::max(cov(i, i), 0.0))}; };
  for (int p = 0; p < k; ++p) {
    out.center.push_back(entry(3 * p));
    out.hwhm.push_back(entry(3 * p + 1));
    out.amplitude.push_back(entry(3 * p + 2));
  }
  return out;
}

RabiLevel extract_level(const SpectrumRecord& spectrum, const ExtractOptions& options,
                        const SpectrumRecord* seed_spectrum) {
  spectrum.validate();
  if (options.k_peaks < 1) throw InvalidInput("extract: need at least one peak per level");
  LorentzianFitOptions fit_opts;
  fit_opts.x_min = options.min_freq_MHz;
  fit_opts.x_max = options.max_freq_MHz;
  fit_opts.init = seed_peaks(spectrum, seed_spectrum, options);
  const LorentzianFit fit = fit_lorentzians(spectrum, options.k_peaks, fit_opts);

  RabiLevel level;
  level.b1_label = spectrum.label;
  level.b1_mT = spectrum.b1_mT;
  level.baseline = fit.baseline;
  std::optional<WidthCalibration> cal;
  if (options.calibrate_widths && spectrum.source) {
    fit_opts.init.reset();
    cal = calibrate_widths(fit, spectrum, fit_opts);
  }
  for (std::size_t p = 0; p < fit.peaks.size(); ++p) {
    ComponentEstimate c;
    c.raw_omega = {fit.peaks[p].center, fit.errors[p].center};
    c.calibrated = cal && cal->reproduced[p];
    c.omega = c.calibrated ? cal->center[p] : c.raw_omega;
    c.raw_width = {fit.peaks[p].hwhm, fit.errors[p].hwhm};
    c.amplitude = {fit.peaks[p].amplitude, fit.errors[p].amplitude};
    c.width = c.calibrated ? cal->hwhm[p] : c.raw_width;
    level.peaks.push_back(c);
  }
  level.low = level.peaks.front();
  level.high = level.peaks.back();
  return level;
}

RabiLevel extract_level(const TransientRecord& transient, const ExtractOptions& options,
                        int zero_pad_factor) {
  const SpectrumRecord rect = fft_magnitude(transient, Window::Rectangular, zero_pad_factor);
  const SpectrumRecord hann = fft_magnitude(transient, Window::Hann, zero_pad_factor);
  return extract_level(rect, options, &hann);
}

RabiComponentTable extract_components(const std::vector<SpectrumRecord>& spectra,
                                      const ExtractOptions& options) {
  if (spectra.empty()) throw InvalidInput("extract_components: no spectra");
  RabiComponentTable table;
  for (const auto& s : spectra) table.levels.push_back(extract_level(s, options));
  return table;
}

RabiComponentTable extract_components(const std::vector<TransientRecord>& transients,
                                      const ExtractOptions& options, int zero_pad_factor) {
  if (transients.empty()) throw InvalidInput("extract_components: no transients");
  RabiComponentTable table;
  for (const auto& t : transients) table.levels.push_back(extract_level(t, options, zero_pad_factor));
  return table;
}

Measured larmor_detuning(Measured omega_small, Measured omega_large, double xi) {
  return larmor_detuning_clipped(omega_small, omega_large, xi, 0.0);
}

Measured larmor_detuning_clipped(Measured omega_small, Measured omega_large, double xi,
                                 double tolerance_sigmas, bool* clipped) {
  if (!(xi > 1.0)) throw InvalidInput("larmor_detuning: xi must exceed 1");
  if (!(omega_small.sigma >= 0.0) || !(omega_large.sigma >= 0.0))
    throw InvalidInput("larmor_detuning: sigmas must be non-negative");
  if (clipped) *clipped = false;
  const double xi2 = xi * xi;
  double disc = xi2 * omega_small.value * omega_small.value -
                omega_large.value * omega_large.value;
  const double disc_sigma = std::hypot(2.0 * xi2 * omega_small.value * omega_small.sigma,
                                       2.0 * omega_large.value * omega_large.sigma);
  if (disc < 0.0) {
    const double below = disc_sigma > 0.0 ? -disc / disc_sigma : std::numeric_limits<double>::infinity();
    if (!(below <= tolerance_sigmas))
      throw InconsistentMeasurement("larmor_detuning: negative discriminant", below);
    disc = 0.0;
    if (clipped) *clipped = true;
  }
  const double r = disc / (xi2 - 1.0);
  const double r_sigma = disc_sigma / (xi2 - 1.0);
  const double d = std::sqrt(r);
  // sigma_r / (2d), kept finite as d -> 0 where the square root flattens the error.
  const double sigma = r_sigma > 0.0 ? r_sigma / (d + std::sqrt(d * d + r_sigma)) : 0.0;
  return {d, sigma};
}

Measured kappa_ratio(Measured low_1, Measured high_1, Measured low_2, Measured high_2) {
  const double num = high_1.value * high_1.value - high_2.value * high_2.value;
  const double den = low_1.value * low_1.value - low_2.value * low_2.value;
  if (den == 0.0 || num == 0.0) throw InconsistentMeasurement("kappa_ratio: zero difference", 0.0);
  const double ratio2 = num / den;
  const double g_num[2] = {2.0 * high_1.value / num, -2.0 * high_2.value / num};
  const double g_den[2] = {-2.0 * low_1.value / den, 2.0 * low_2.value / den};
  // Relative sigma of ratio^2.
  const double rel2 = std::sqrt(std::pow(g_num[0] * high_1.sigma, 2) + std::pow(g_num[1] * high_2.sigma, 2) +
                                std::pow(g_den[0] * low_1.sigma, 2) + std::pow(g_den[1] * low_2.sigma, 2));
  if (ratio2 <= 0.0) {
    const double below = rel2 > 0.0 ? 1.0 / rel2 : std::numeric_limits<double>::infinity();
    throw InconsistentMeasurement("kappa_ratio: nonpositive ratio under the square root", below);
  }
  const double ratio = std::sqrt(ratio2);
  return {ratio, 0.5 * ratio * rel2};
}

Measured kappa_ratio(const RabiComponentTable& table) {
  if (table.levels.size() != 2) throw InvalidInput("kappa_ratio: need exactly two B1 levels");
  const auto& a = table.levels[0];
  const auto& b = table.levels[1];
  return kappa_ratio(a.low.omega, a.high.omega, b.low.omega, b.high.omega);
}

double detuning_to_field(double delta_MHz, double g) {
  if (!(g > 0.0)) throw InvalidInput("detuning_to_field: g must be positive");
  return mhz_to_rad_per_us(delta_MHz) / (g * PhysConstants::gamma_per_g);
}

Measured detuning_to_field(Measured delta_MHz, double g) {
  return {detuning_to_field(delta_MHz.value, g), detuning_to_field(delta_MHz.sigma, g)};
}

DecayWidthReport decay_width_consistency(Measured decay_time_ns, Measured width_MHz) {
  if (!(decay_time_ns.value > 0.0) || !(width_MHz.value > 0.0))
    throw InvalidInput("decay_width_consistency: inputs must be positive");
  DecayWidthReport rep;
  const double expected = 1.0 / (2.0 * std::numbers::pi * ns_to_us(decay_time_ns.value));
  rep.expected_hwhm = {expected, expected * decay_time_ns.sigma / decay_time_ns.value};
  rep.width = width_MHz;
  rep.discrepancy = width_MHz.value - expected;
  const double combined = std::hypot(width_MHz.sigma, rep.expected_hwhm.sigma);
  rep.significance = combined > 0.0 ? std::abs(rep.discrepancy) / combined
                                    : (rep.discrepancy == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  rep.agrees = rep.significance <= 1.0;
  return rep;
}

}  // namespace spinpair
