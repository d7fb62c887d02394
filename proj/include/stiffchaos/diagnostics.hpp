#pragma once

/**
 * @file diagnostics.hpp
 * @brief Local Lyapunov exponents, trajectory curvature and the step-size
 * bounds used to classify local stiffness and chaoticity.
 *
 * Local Lyapunov exponents are the eigenvalues of the Jacobian of the
 * variational system over a short interval. Global exponents are their long
 * time averages along a trajectory and are not computed here.
 */

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "stiffchaos/eigen.hpp"
#include "stiffchaos/ode_core.hpp"

namespace stiffchaos {

struct EigenSet {
  std::vector<Complex> values;
  double t = 0.0;

  [[nodiscard]] double gamma_max() const;
  [[nodiscard]] double gamma_min() const;
};

struct LleTrace {
  std::vector<EigenSet> samples;
  std::vector<double> gamma_max;
  std::vector<double> gamma_min;

  void push(EigenSet set);
  [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
  /// Fraction of samples with gamma_max > 0.
  [[nodiscard]] double chaotic_fraction() const;
};

struct StiffnessSample {
  double t = 0.0;
  double kappa = 0.0;
  double dt_max = 0.0;
  /// NaN where gamma_min >= 0 (no decaying mode, bound undefined).
  double dt_stiff = 0.0;
  double Q = 0.0;
  /// NaN where kappa == 0.
  double R = 0.0;
  double gamma_min = 0.0;
};

struct StiffnessReport {
  std::vector<StiffnessSample> samples;
  double eps = 0.0;
  /// Local time origin t_n and the window length used as the Q cap.
  double t_origin = 0.0;
  double window = 0.0;
};

struct CurvaturePoint {
  double t = 0.0;
  double kappa = 0.0;
};

using MatrixFn = std::function<Matrix(double t, const State& u)>;

[[nodiscard]] EigenSet local_eigenvalues(const Matrix& jac, double t = 0.0);

/// |u''| / (1 + u'^2)^(3/2).
[[nodiscard]] double curvature(double u_prime, double u_double_prime);

/// Curvature of one state component along a trajectory. Uses u' = f_i and
/// u'' = (df/dt + J f)_i when the problem provides both a Jacobian and a time
/// derivative, otherwise finite differences on the (possibly non-uniform)
/// sample grid. Needs at least 5 samples.
[[nodiscard]] std::vector<CurvaturePoint> curvature_along(const Trajectory& traj,
                                                          const OdeProblem& problem,
                                                          std::size_t component);

/// Largest step resolving curvature kappa to accuracy eps by a secant;
/// +infinity for kappa == 0.
[[nodiscard]] double dt_max(double kappa, double eps);

/// Curvature of the decaying perturbation eps*exp(gamma*t_star).
[[nodiscard]] double kappa_stiff(double gamma, double eps, double t_star);

/// Location of the curvature maximum of eps*exp(gamma*t); negative when the
/// maximum over t >= 0 sits at t = 0 (2 gamma^2 eps^2 < 1).
[[nodiscard]] double t_star_max(double gamma, double eps);

/// sup over s >= t_star of kappa_stiff(gamma, eps, s).
[[nodiscard]] double kappa_stiff_sup(double gamma, double eps, double t_star = 0.0);

/// Step bound imposed by a mode exp(gamma t), gamma < 0. The large-amplitude
/// branch (2 gamma^2 eps^2 >= 1) uses the interior curvature maximum, the
/// other branch the value at the start of the interval.
[[nodiscard]] double dt_stiff(double gamma, double eps);

/// dt_stiff seen at local time t_star into the interval: the secant bound for
/// the largest perturbation curvature still ahead. Equals dt_stiff at t_star=0.
[[nodiscard]] double dt_stiff_at(double gamma, double eps, double t_star);

/// Q = dt_max / dt_stiff; an unbounded dt_max is replaced by `cap`.
/// Returns 0 when dt_stiff is undefined (NaN).
[[nodiscard]] double q_ratio(double dt_max_value, double dt_stiff_value, double cap);

/// R = |gamma_min| / kappa, NaN for kappa == 0.
[[nodiscard]] double r_ratio(double gamma_min, double kappa);

/// Per-sample stiffness measures for trajectory samples with t in
/// [t_from, t_to]. Local time for dt_stiff is measured from the first sample
/// in that window.
[[nodiscard]] StiffnessReport stiffness_report(
    const Trajectory& traj, const OdeProblem& problem, const MatrixFn& variational_jac, double eps,
    std::size_t component, double t_from = -std::numeric_limits<double>::infinity(),
    double t_to = std::numeric_limits<double>::infinity());

}  // namespace stiffchaos
