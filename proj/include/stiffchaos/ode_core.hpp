#pragma once

/**
 * @file ode_core.hpp
 * @brief Problem abstraction and the three integrators: fixed-step RK4,
 * step-doubling adaptive RK4 and adaptive implicit trapezoid.
 */

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stiffchaos/linalg.hpp"

namespace stiffchaos {

using RhsFn = std::function<State(double t, const State& u)>;
using JacobianFn = std::function<Matrix(double t, const State& u)>;

/// du/dt = rhs(t, u), u(t_start) = u0, integrated over [t_start, t_end].
struct OdeProblem {
  std::string name;
  std::size_t dim = 0;
  std::map<std::string, double> params;
  RhsFn rhs;
  JacobianFn jacobian;
  /// Explicit time derivative of the rhs. Left empty when unknown; the
  /// curvature code then falls back to finite differences on the trajectory.
  RhsFn dfdt;
  State u0;
  double t_start = 0.0;
  double t_end = 1.0;

  /// Throws std::invalid_argument on dim/u0/t_span inconsistencies.
  void validate() const;
  [[nodiscard]] double span() const noexcept { return t_end - t_start; }
  [[nodiscard]] double param(const std::string& key) const;
};

enum class SolverId { rk4_fixed, rk4_adaptive, trapezoid_adaptive };

[[nodiscard]] std::string_view to_string(SolverId id) noexcept;

enum class StagnationReason { dt_min, max_steps };

/// Set when an adaptive run stops before t_end. Not an error: it is the
/// expected outcome of explicit stepping on strongly stiff problems.
struct Stagnation {
  double t_reached = 0.0;
  std::size_t steps = 0;
  StagnationReason reason = StagnationReason::max_steps;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::size_t steps_taken = 0;
  std::size_t steps_rejected = 0;
  SolverId solver_id = SolverId::rk4_fixed;
  std::optional<Stagnation> stagnation;

  [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
  [[nodiscard]] const State& back() const { return states.back(); }
  /// Index of the stored sample closest in time to t.
  [[nodiscard]] std::size_t nearest_index(double t) const;
};

struct AdaptiveConfig {
  double tol = 1e-3;
  /// Absolute floor added to the relative error scale, so components that
  /// pass through zero stay controllable.
  double atol = 1e-10;
  double dt_init = 1e-2;
  double dt_min = 1e-14;
  double dt_max = 1e300;
  std::size_t max_steps = 100000;

  void validate() const;
};

/// Classical 4-stage Runge-Kutta with n_steps equidistant steps.
/// Throws NonFiniteState on blow-up.
[[nodiscard]] Trajectory solve_rk4_fixed(const OdeProblem& problem, std::size_t n_steps);

/// Fixed-step RK4 storing only every `stride`-th state (plus the last one).
[[nodiscard]] Trajectory solve_rk4_strided(const OdeProblem& problem, std::size_t n_steps,
                                           std::size_t stride);

/// Single classical RK4 step.
[[nodiscard]] State rk4_step(const RhsFn& rhs, double t, const State& u, double h);

/// Step-doubling RK4. Each step is compared against two half steps and the
/// half-step result is kept. Stops with `stagnation` set when dt falls below
/// dt_min or the step budget runs out.
[[nodiscard]] Trajectory solve_rk4_adaptive(const OdeProblem& problem, const AdaptiveConfig& cfg);

/// Implicit trapezoid with Newton iteration on the analytic Jacobian and
/// step-doubling error control. Throws NewtonDivergence when Newton keeps
/// failing down to dt_min.
[[nodiscard]] Trajectory solve_trapezoid_adaptive(const OdeProblem& problem,
                                                  const AdaptiveConfig& cfg);

/// One trapezoid step solved by Newton iteration (max 25 iterations,
/// scaled residual <= newton_tol). Returns nullopt when Newton fails.
[[nodiscard]] std::optional<State> trapezoid_step(const OdeProblem& problem, double t,
                                                  const State& u, double h, double newton_tol,
                                                  double atol);

/// Fine-step RK4 oracle sampled on the base grid of `base_steps` steps.
/// Integrates with base_steps*refinement and base_steps*2*refinement steps and
/// throws OracleNotConverged when the two differ by `threshold` or more.
[[nodiscard]] Trajectory reference_solution(const OdeProblem& problem, std::size_t base_steps,
                                            std::size_t refinement, double threshold = 1e-8);

}  // namespace stiffchaos
