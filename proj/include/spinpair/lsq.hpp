#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace spinpair {

using Residuals = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

struct LsqOptions {
  int max_iter = 200;
  double grad_tol = 1e-8;   // cosine between residual and Jacobian columns
  double step_tol = 1e-10;  // relative parameter change
  double initial_damping = 1e-9;
  double chi2_tol = 0.0;  // stop once chi2 falls to this level
  double rel_chi2_tol = 1e-20;  // or to this fraction of the initial chi2
  double fd_rel_step = 0.0;  // central-difference step; 0 selects cbrt(eps)
  // Residuals are already divided by known standard deviations: the
  // covariance is not rescaled by the reduced chi-square.
  bool absolute_sigma = false;
  std::optional<Eigen::VectorXd> lower;
  std::optional<Eigen::VectorXd> upper;
  // Optional analytic Jacobian of the residuals; central differences otherwise.
  JacobianFn jacobian;
};

struct FitResult {
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd jacobian;  // of the residuals at params
  double chi2 = 0.0;
  double chi2_initial = 0.0;
  int n_iter = 0;  // accepted steps
  int dof = 0;
  bool converged = false;
  std::string message;

  double sigma(int i) const;
};

// Levenberg-Marquardt minimization of |r(p)|^2 with box constraints handled by
// projection. Throws RankDeficiency when the Jacobian is numerically singular.
FitResult solve_damped_lsq(const Residuals& residuals, const Eigen::VectorXd& init,
                           const LsqOptions& options = {});

using ModelFn = std::function<double(double, const Eigen::VectorXd&)>;

// Curve fit y ~ model(x, p). With `sigma` the residuals are weighted and the
// covariance is absolute; otherwise uniform weights and reduced-chi-square scaling.
FitResult fit_curve(const ModelFn& model, const std::vector<double>& x,
                    const std::vector<double>& y, const Eigen::VectorXd& init,
                    const std::vector<double>* sigma = nullptr, LsqOptions options = {});

Eigen::MatrixXd finite_difference_jacobian(const Residuals& residuals, const Eigen::VectorXd& p,
                                           double rel_step = 0.0);

}  // namespace spinpair
