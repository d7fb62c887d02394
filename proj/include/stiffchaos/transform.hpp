#pragma once

/**
 * @file transform.hpp
 * @brief Exponential variable transformation x_i = eps_i exp(mu_i t) z_i of
 * the Lorenz 1984 system, the mu selection strategies (Methods 1-4) and the
 * interval-segmented RK4 driver with back-transformation.
 *
 * Local time restarts at zero in every interval, so exponential factors stay
 * bounded by exp(|mu| * interval length).
 */

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "stiffchaos/diagnostics.hpp"
#include "stiffchaos/problems.hpp"

namespace stiffchaos {

using Vec3 = std::array<double, 3>;

enum class Method { none, fixed_mu, local_gamma, cumulative_avg, window_avg };

/// Which Jacobian feeds gamma_max for Methods 2-4: the transformed J* with the
/// current interval's mu, or the untransformed Lorenz J at the same state.
enum class GammaSource { untransformed, jstar };

[[nodiscard]] std::string_view to_string(Method m) noexcept;
/// Accepts none, 1, 2, 3, 4.
[[nodiscard]] Method parse_method(std::string_view s);
[[nodiscard]] std::string_view to_string(GammaSource g) noexcept;
[[nodiscard]] GammaSource parse_gamma_source(std::string_view s);

struct LorenzParams {
  double a = 0.25;
  double b = 4.0;
  double F = 8.0;
  double G = 1.0;

  [[nodiscard]] static LorenzParams from(const OdeProblem& problem);
};

struct TransformParams {
  Vec3 eps_scale{1.0, 1.0, 1.0};
  /// mu of the interval currently being integrated.
  Vec3 mu{0.0, 0.0, 0.0};
  double q = 1.0;
  Vec3 coeffs{1.5, 0.66, 0.5};
  Vec3 mu_init{0.0, 0.0, 0.0};
  Vec3 fixed_mu{2.592, 1.944, 1.539};
  GammaSource gamma_source = GammaSource::untransformed;

  /// Per-method defaults: Method 1 uses fixed_mu throughout, Method 2 starts
  /// at (2,2,2) with q = 1 on J*, Methods 3 and 4 start at (2.16,1.62,1.28).
  [[nodiscard]] static TransformParams defaults(Method m);
  void validate() const;
};

struct IntervalPlan {
  std::size_t N = 600;
  std::size_t K = 1;
  double t_start = 0.0;
  double t_end = 30.0;

  [[nodiscard]] std::size_t steps_per_interval() const { return N / K; }
  [[nodiscard]] double dt() const { return (t_end - t_start) / static_cast<double>(N); }
  /// Throws std::invalid_argument unless K divides N and t_end > t_start.
  void validate() const;
  /// Default K for a method: N/K = 10 for Methods 1-2, 40 for 3-4, K=1 otherwise.
  [[nodiscard]] static IntervalPlan for_method(Method m, std::size_t N, double t_start,
                                               double t_end);
};

struct TransformRun {
  IntervalPlan plan;
  Method method = Method::none;
  TransformParams params;
  std::vector<Vec3> mu_history;
  std::vector<double> gamma_max_history;
  Trajectory solution;
  /// |x - x_ref|, |y - y_ref|, |z - z_ref| at each of the N+1 sample times.
  std::vector<Vec3> errors_vs_reference;

  [[nodiscard]] double max_error(std::size_t component = 0) const;
  [[nodiscard]] double mean_error(std::size_t component = 0) const;
};

/// Right-hand side of the transformed system at local time t_local with
/// params.mu. Throws ExponentOverflow when an exponent argument exceeds 700.
[[nodiscard]] Vec3 transformed_rhs(const TransformParams& params, const LorenzParams& lp,
                                   double t_local, const Vec3& z);

/// Jacobian of the transformed system at t_local = 0:
/// J*_ij = (eps_j/eps_i) J_ij(eps z) - mu_i delta_ij.
[[nodiscard]] Matrix jstar(const TransformParams& params, const Vec3& z, double a, double b);

/// mu for interval `interval` given gamma_max of all completed intervals.
[[nodiscard]] Vec3 select_mu(Method method, const std::vector<double>& history,
                             const TransformParams& params, std::size_t interval);

/// Integrates the Lorenz problem of `spec` with the transformed system, K
/// intervals of N/K RK4 steps each. `reference` must hold the N+1 oracle
/// samples on the same grid.
[[nodiscard]] TransformRun run_transformed(const BenchmarkSpec& spec, const IntervalPlan& plan,
                                           Method method, TransformParams params,
                                           const Trajectory& reference);

struct StepExtensionPoint {
  double t = 0.0;
  double dt_max = 0.0;
};

struct StepExtensionReport {
  std::vector<StepExtensionPoint> points;
  double delta = 0.0;
  double eps = 0.0;
  /// Minimum over samples with finite dt_max.
  double min_dt_max = 0.0;

  [[nodiscard]] double min_ratio() const { return min_dt_max / delta; }
};

/// dt_max(t) from the curvature of the reference z-component at accuracy
/// eps_achieved, for comparison with the fixed step of the run.
[[nodiscard]] StepExtensionReport step_extension_report(const BenchmarkSpec& spec,
                                                        const TransformRun& run,
                                                        const Trajectory& reference,
                                                        double eps_achieved);

/// Eigenvalues of J*(z; mu) at n_samples equidistant times, with z = x/eps
/// taken from the nearest trajectory sample (the t = 0 approximation).
[[nodiscard]] LleTrace jstar_scan(const BenchmarkSpec& spec, const Trajectory& traj,
                                  const TransformParams& params, std::size_t n_samples);

struct StiffTransformDemo {
  double a = 0.0;
  double kappa_g = 0.0;
  double eps = 0.0;
  /// Rate of the transform amplitude A(t) = A(0) exp(rate * t).
  double growth_rate = 0.0;
  double dt_stiff_u = 0.0;
  double dt_max_z = 0.0;
  [[nodiscard]] double ratio() const { return dt_max_z / dt_stiff_u; }
};

/// Linear transform z = (u - B)/A of the stiff linear problem: A(t) decays
/// at kappa_f - kappa_g with kappa_f = -a, so resolving z needs a step of
/// the same order as the stiffness bound on u. A(0) = eps.
[[nodiscard]] StiffTransformDemo stiff_transform_demo(double a, double kappa_g, double eps);

}  // namespace stiffchaos
