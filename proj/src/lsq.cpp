#include "spinpair/lsq.hpp"

#include <cmath>
#include <limits>

#include "spinpair/errors.hpp"

namespace spinpair {

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& p, const LsqOptions& o) {
  Eigen::VectorXd out = p;
  if (o.lower) out = out.cwiseMax(*o.lower);
  if (o.upper) out = out.cwiseMin(*o.upper);
  return out;
}

void check_rank(const Eigen::MatrixXd& j) {
  Eigen::MatrixXd scaled = j;
  for (Eigen::Index c = 0; c < j.cols(); ++c) {
    const double n = j.col(c).norm();
    if (n == 0.0) throw RankDeficiency("least squares: parameter " + std::to_string(c) + " has no effect");
    scaled.col(c) /= n;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) < 1e-10 * s(0))
    throw RankDeficiency("least squares: normal equations are singular");
}

// Largest cosine between the residual vector and a Jacobian column.
double gradient_measure(const Eigen::MatrixXd& j, const Eigen::VectorXd& r) {
  const double rn = r.norm();
  if (rn == 0.0) return 0.0;
  const Eigen::VectorXd g = j.transpose() * r;
  double worst = 0.0;
  for (Eigen::Index c = 0; c < j.cols(); ++c) {
    const double cn = j.col(c).norm();
    if (cn > 0.0) worst = std::max(worst, std::abs(g(c)) / (cn * rn));
  }
  return worst;
}

}  // namespace

double FitResult::sigma(int i) const { return std::sqrt(std::max(covariance(i, i), 0.0)); }

Eigen::MatrixXd finite_difference_jacobian(const Residuals& residuals, const Eigen::VectorXd& p,
                                           double rel_step) {
  const double base_step =
      rel_step > 0.0 ? rel_step : std::cbrt(std::numeric_limits<double>::epsilon());
  Eigen::MatrixXd j;
  Eigen::VectorXd q = p;
  for (Eigen::Index c = 0; c < p.size(); ++c) {
    const double h = base_step * std::max(std::abs(p(c)), 1e-3);
    q(c) = p(c) + h;
    const Eigen::VectorXd plus = residuals(q);
    q(c) = p(c) - h;
    const Eigen::VectorXd minus = residuals(q);
    q(c) = p(c);
    if (c == 0) j.resize(plus.size(), p.size());
    j.col(c) = (plus - minus) / (2.0 * h);
  }
  return j;
}

FitResult solve_damped_lsq(const Residuals& residuals, const Eigen::VectorXd& init,
                           const LsqOptions& options) {
  if (init.size() == 0) throw InvalidInput("least squares: no parameters");
  if (!init.allFinite()) throw InvalidInput("least squares: non-finite initial parameters");
  auto jacobian = [&](const Eigen::VectorXd& p) {
    return options.jacobian ? options.jacobian(p) : finite_difference_jacobian(residuals, p, options.fd_rel_step);
  };

  FitResult fit;
  Eigen::VectorXd p = project(init, options);
  Eigen::VectorXd r = residuals(p);
  if (!r.allFinite()) throw InvalidInput("least squares: non-finite residuals at the initial point");
  if (r.size() < p.size()) throw InvalidInput("least squares: fewer residuals than parameters");
  fit.chi2_initial = r.squaredNorm();
  double chi2 = fit.chi2_initial;
  double lambda = options.initial_damping;
  Eigen::MatrixXd j = jacobian(p);
  check_rank(j);

  int evaluations = 0;
  while (true) {
    if (chi2 <= options.chi2_tol || chi2 <= options.rel_chi2_tol * fit.chi2_initial) {
      fit.converged = true;
      fit.message = "residual tolerance reached";
      break;
    }
    if (gradient_measure(j, r) <= options.grad_tol) {
      fit.converged = true;
      fit.message = "gradient tolerance reached";
      break;
    }
    if (evaluations >= options.max_iter) {
      fit.message = "iteration limit reached";
      break;
    }
    ++evaluations;
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd g = j.transpose() * r;
    bool accepted = false;
    bool small_step = false;
    while (lambda < 1e16) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * jtj.diagonal();
      const Eigen::VectorXd step = a.ldlt().solve(-g);
      const Eigen::VectorXd trial = project(p + step, options);
      const Eigen::VectorXd r_trial = residuals(trial);
      const double chi2_trial = r_trial.allFinite() ? r_trial.squaredNorm()
                                                     : std::numeric_limits<double>::infinity();
      if (chi2_trial < chi2) {
        small_step = (trial - p).norm() <= options.step_tol * (p.norm() + options.step_tol);
        p = trial;
        r = r_trial;
        chi2 = chi2_trial;
        lambda = std::max(lambda * 0.5, 1e-15);
        accepted = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted) {
      // No descent is possible: accept as converged when the undamped
      // Gauss-Newton model predicts a negligible reduction.
      const Eigen::VectorXd gn = jtj.ldlt().solve(-g);
      const double predicted = -g.dot(gn);
      const bool blocked = (project(p + gn, options) - p).norm() <= 1e-8 * (p.norm() + 1e-8);
      fit.converged =
          blocked || predicted <= 1e-12 * std::max(chi2, std::numeric_limits<double>::min());
      fit.message = fit.converged ? "no further reduction possible" : "damping diverged";
      break;
    }
    ++fit.n_iter;
    j = jacobian(p);
    if (small_step) {
      fit.converged = true;
      fit.message = "step tolerance reached";
      break;
    }
  }

  check_rank(j);
  fit.params = p;
  fit.chi2 = chi2;
  fit.jacobian = j;
  fit.dof = static_cast<int>(r.size() - p.size());
  const Eigen::MatrixXd jtj = j.transpose() * j;
  Eigen::MatrixXd cov = jtj.ldlt().solve(Eigen::MatrixXd::Identity(p.size(), p.size()));
  cov = 0.5 * (cov + cov.transpose());
  double scale = 1.0;
  if (!options.absolute_sigma) scale = fit.dof > 0 ? chi2 / fit.dof : 0.0;
  fit.covariance = scale * cov;
  return fit;
}

FitResult fit_curve(const ModelFn& model, const std::vector<double>& x,
                    const std::vector<double>& y, const Eigen::VectorXd& init,
                    const std::vector<double>* sigma, LsqOptions options) {
  if (x.size() != y.size()) throw InvalidInput("fit_curve: x and y differ in length");
  if (sigma && sigma->size() != y.size()) throw InvalidInput("fit_curve: sigma length mismatch");
  if (sigma)
    for (double s : *sigma)
      if (!(s > 0.0)) throw InvalidInput("fit_curve: sigmas must be positive");
  options.absolute_sigma = sigma != nullptr;
  auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
      r(i) = y[i] - model(x[i], p);
      if (sigma) r(i) /= (*sigma)[i];
    }
    return r;
  };
  return solve_damped_lsq(residuals, init, options);
}

}  // namespace spinpair
