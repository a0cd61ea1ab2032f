#include "spinpair/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinpair/errors.hpp"

namespace spinpair {

std::vector<PeakCandidate> find_peaks(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<PeakCandidate> out;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
    double left_min = y[i];
    std::size_t j = i;
    while (j > 0 && y[j - 1] <= y[i]) left_min = std::min(left_min, y[--j]);
    double right_min = y[i];
    j = i;
    while (j + 1 < n && y[j + 1] <= y[i]) right_min = std::min(right_min, y[++j]);
    PeakCandidate c;
    c.index = i;
    c.prominence = y[i] - std::max(left_min, right_min);

    const double level = y[i] - 0.5 * c.prominence;
    auto crossing = [&](std::size_t from, int dir) {
      std::size_t k = from;
      while (true) {
        const std::size_t next = k + dir;
        if ((dir < 0 && k == 0) || (dir > 0 && next >= n)) return x[k];
        if (y[next] < level) {
          const double f = (y[k] - level) / (y[k] - y[next]);
          return x[k] + f * (x[next] - x[k]);
        }
        k = next;
      }
    };
    c.half_width = 0.5 * (crossing(i, +1) - crossing(i, -1));
    out.push_back(c);
  }
  std::stable_sort(out.begin(), out.end(), [](const PeakCandidate& a, const PeakCandidate& b) {
    return a.prominence > b.prominence;
  });
  return out;
}

namespace {

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + mid));
  return m;
}

}  // namespace

LorentzianFit fit_lorentzians(const SpectrumRecord& spectrum, int k,
                              const LorentzianFitOptions& options) {
  spectrum.validate();
  if (k < 1) throw InvalidInput("fit_lorentzians: k must be >= 1");

  LorentzianFit out;
  out.first_index = 0;
  out.last_index = spectrum.size();
  if (options.x_min)
    while (out.first_index < out.last_index && spectrum.x[out.first_index] < *options.x_min)
      ++out.first_index;
  if (options.x_max)
    while (out.last_index > out.first_index && spectrum.x[out.last_index - 1] > *options.x_max)
      --out.last_index;
  const std::vector<double> x(spectrum.x.begin() + out.first_index,
                              spectrum.x.begin() + out.last_index);
  const std::vector<double> y(spectrum.y.begin() + out.first_index,
                              spectrum.y.begin() + out.last_index);
  if (x.size() < static_cast<std::size_t>(3 * k + 2))
    throw InvalidInput("fit_lorentzians: need at least 3k+2 points in the fit range");
  std::optional<std::vector<double>> sigma;
  if (options.sigma) {
    if (options.sigma->size() != spectrum.size())
      throw InvalidInput("fit_lorentzians: sigma length mismatch");
    sigma.emplace(options.sigma->begin() + out.first_index,
                  options.sigma->begin() + out.last_index);
  }

  const double base0 = median(y);
  std::vector<LorentzianPeak> init;
  if (options.init) {
    init = *options.init;
    if (init.size() != static_cast<std::size_t>(k))
      throw InvalidInput("fit_lorentzians: init must hold k peaks");
  } else {
    const auto candidates = find_peaks(x, y);
    if (candidates.size() < static_cast<std::size_t>(k))
      throw InitializationError("fit_lorentzians: found " + std::to_string(candidates.size()) +
                                " maxima, need " + std::to_string(k));
    const double dx = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
    for (int p = 0; p < k; ++p) {
      const auto& c = candidates[p];
      init.push_back({x[c.index], std::max(c.half_width, dx),
                      std::max(y[c.index] - base0, c.prominence)});
    }
  }

  const Eigen::Index np = 3 * k + 1;
  Eigen::VectorXd p0(np);
  for (int p = 0; p < k; ++p) {
    if (!(init[p].hwhm > 0.0)) throw InvalidInput("fit_lorentzians: initial width must be positive");
    p0(3 * p) = init[p].center;
    p0(3 * p + 1) = init[p].hwhm;
    p0(3 * p + 2) = std::max(init[p].amplitude, 0.0);
  }
  p0(np - 1) = base0;

  const double min_width = 1e-6 * (x.back() - x.front()) / static_cast<double>(x.size());
  LsqOptions lsq;
  lsq.lower = Eigen::VectorXd::Constant(np, -std::numeric_limits<double>::infinity());
  for (int p = 0; p < k; ++p) {
    (*lsq.lower)(3 * p + 1) = min_width;
    (*lsq.lower)(3 * p + 2) = 0.0;
  }
  lsq.absolute_sigma = sigma.has_value();
  const Eigen::Index m = static_cast<Eigen::Index>(x.size());
  auto weight = [&](Eigen::Index i) { return sigma ? 1.0 / (*sigma)[i] : 1.0; };
  auto residuals = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd r(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      double model = q(np - 1);
      for (int p = 0; p < k; ++p) model += LorentzianPeak{q(3 * p), q(3 * p + 1), q(3 * p + 2)}(x[i]);
      r(i) = (y[i] - model) * weight(i);
    }
    return r;
  };
  lsq.jacobian = [&](const Eigen::VectorXd& q) {
    Eigen::MatrixXd j(m, np);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double w = weight(i);
      for (int p = 0; p < k; ++p) {
        const double c = q(3 * p), hw = q(3 * p + 1), a = q(3 * p + 2);
        const double u = (x[i] - c) / hw;
        const double d = 1.0 / (1.0 + u * u);
        j(i, 3 * p) = -w * a * 2.0 * u / hw * d * d;
        j(i, 3 * p + 1) = -w * a * 2.0 * u * u / hw * d * d;
        j(i, 3 * p + 2) = -w * d;
      }
      j(i, np - 1) = -w;
    }
    return j;
  };
  out.fit = solve_damped_lsq(residuals, p0, lsq);

  std::vector<int> order(k);
  for (int p = 0; p < k; ++p) order[p] = p;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return out.fit.params(3 * a) < out.fit.params(3 * b); });
  for (int p : order) {
    out.peaks.push_back({out.fit.params(3 * p), out.fit.params(3 * p + 1), out.fit.params(3 * p + 2)});
    out.errors.push_back({out.fit.sigma(3 * p), out.fit.sigma(3 * p + 1), out.fit.sigma(3 * p + 2)});
  }
  out.peak_covariance.resize(3 * k, 3 * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      out.peak_covariance.block(3 * a, 3 * b, 3, 3) =
          out.fit.covariance.block(3 * order[a], 3 * order[b], 3, 3);
  out.baseline = out.fit.params(np - 1);
  out.baseline_sigma = out.fit.sigma(static_cast<int>(np - 1));
  return out;
}

std::vector<EnvelopePoint> detect_envelope_maxima(const TransientRecord& transient,
                                                  std::optional<double> min_spacing_ns) {
  transient.validate();
  const std::size_t n = transient.size();
  if (n < 5) throw InvalidInput("detect_envelope_maxima: need at least 5 points");
  const auto& t = transient.tau_ns;
  std::vector<double> s(n, 0.0);
  for (std::size_t i = 2; i + 2 < n; ++i)
    s[i] = (transient.q[i - 2] + transient.q[i - 1] + transient.q[i] + transient.q[i + 1] +
            transient.q[i + 2]) / 5.0;

  std::vector<EnvelopePoint> maxima;
  // Only samples whose neighbours have a full smoothing window.
  for (std::size_t i = 3; i + 3 < n; ++i) {
    if (!(s[i] > s[i - 1] && s[i] >= s[i + 1])) continue;
    const double curvature = s[i - 1] - 2.0 * s[i] + s[i + 1];
    double offset = 0.0;
    if (curvature < 0.0) offset = std::clamp(0.5 * (s[i - 1] - s[i + 1]) / curvature, -0.5, 0.5);
    const double step = offset >= 0.0 ? t[i + 1] - t[i] : t[i] - t[i - 1];
    maxima.push_back({t[i] + offset * step, s[i] - 0.25 * (s[i - 1] - s[i + 1]) * offset});
  }
  if (maxima.empty()) throw NoMaxima("detect_envelope_maxima: no local maxima");

  if (min_spacing_ns && *min_spacing_ns > 0.0) {
    std::vector<EnvelopePoint> by_height = maxima;
    std::stable_sort(by_height.begin(), by_height.end(),
                     [](const EnvelopePoint& a, const EnvelopePoint& b) { return a.q > b.q; });
    std::vector<EnvelopePoint> kept;
    for (const auto& m : by_height) {
      const bool crowded = std::any_of(kept.begin(), kept.end(), [&](const EnvelopePoint& o) {
        return std::abs(o.tau_ns - m.tau_ns) < *min_spacing_ns;
      });
      if (!crowded) kept.push_back(m);
    }
    std::sort(kept.begin(), kept.end(),
              [](const EnvelopePoint& a, const EnvelopePoint& b) { return a.tau_ns < b.tau_ns; });
    maxima = std::move(kept);
  }
  return maxima;
}

ExpDecayFit fit_exp_decay(const std::vector<EnvelopePoint>& points,
                          const std::optional<std::vector<double>>& sigma) {
  if (points.size() < 2) throw InvalidInput("fit_exp_decay: need at least 2 points");
  if (sigma && sigma->size() != points.size())
    throw InvalidInput("fit_exp_decay: sigma length mismatch");
  for (const auto& p : points) {
    if (!(p.q > 0.0)) throw DomainError("fit_exp_decay: values must be positive");
    if (!std::isfinite(p.tau_ns)) throw InvalidInput("fit_exp_decay: non-finite tau");
  }

  // Log-linear start: ln q = ln A - rate * tau.
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  const double n = static_cast<double>(points.size());
  for (const auto& p : points) {
    const double l = std::log(p.q);
    st += p.tau_ns;
    sl += l;
    stt += p.tau_ns * p.tau_ns;
    stl += p.tau_ns * l;
  }
  const double denom = n * stt - st * st;
  if (denom <= 0.0) throw InvalidInput("fit_exp_decay: points must span distinct tau values");
  const double slope = (n * stl - st * sl) / denom;
  const double intercept = (sl - slope * st) / n;

  const Eigen::Index m = static_cast<Eigen::Index>(points.size());
  auto weight = [&](Eigen::Index i) { return sigma ? 1.0 / (*sigma)[i] : 1.0; };
  auto residuals = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd r(m);
    for (Eigen::Index i = 0; i < m; ++i)
      r(i) = (points[i].q - q(0) * std::exp(-q(1) * points[i].tau_ns)) * weight(i);
    return r;
  };
  LsqOptions lsq;
  lsq.absolute_sigma = sigma.has_value();
  lsq.jacobian = [&](const Eigen::VectorXd& q) {
    Eigen::MatrixXd j(m, 2);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double e = std::exp(-q(1) * points[i].tau_ns);
      j(i, 0) = -e * weight(i);
      j(i, 1) = q(0) * points[i].tau_ns * e * weight(i);
    }
    return j;
  };
  Eigen::VectorXd p0(2);
  p0 << std::exp(intercept), -slope;

  ExpDecayFit out;
  out.fit = solve_damped_lsq(residuals, p0, lsq);
  out.amplitude = out.fit.params(0);
  out.amplitude_sigma = out.fit.sigma(0);
  out.rate = out.fit.params(1);
  out.rate_sigma = out.fit.sigma(1);
  if (out.rate > 0.0) {
    out.decay_time_ns = 1.0 / out.rate;
    out.decay_time_sigma = out.rate_sigma / (out.rate * out.rate);
  } else {
    out.decay_time_ns = std::numeric_limits<double>::infinity();
    out.decay_time_sigma = std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace spinpair
