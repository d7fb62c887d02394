#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stiffchaos/diagnostics.hpp"
#include "stiffchaos/ode_core.hpp"

namespace stiffchaos {

using ExactFn = std::function<State(double t)>;

struct BenchmarkSpec {
  OdeProblem problem;
  /// Jacobian of the perturbation system d(delta u)/dt = J delta u.
  MatrixFn variational_jacobian;
  std::optional<ExactFn> exact;
  double default_eps = 1e-3;
};

/// du/dt = -a u + a t + a + 1 on [0, 1]. With u(0) = 1 + c the exact solution
/// is 1 + t + c exp(-a t).
[[nodiscard]] BenchmarkSpec stiff_linear(double a, double u0 = 1.0, double t_end = 1.0);

/// du/dt = u^2 - u^3, u(0) = d on [0, 2/d]. The exact solution is the root
/// of 1/u + ln((1-u)/u) = 1/d + ln((1-d)/d) - t, found by bisection.
[[nodiscard]] BenchmarkSpec flame(double d);

/// Exact flame solution; bisection on (0,1) to `tol` in u.
[[nodiscard]] double flame_exact(double d, double t, double tol = 1e-15);

/// Robertson chemical kinetics on [1e-6, 1e6], u0 = (1, 0, 0).
[[nodiscard]] BenchmarkSpec robertson(double a = 0.04, double b = 1e4, double c = 3e7);

/// Lorenz 1984 Hadley circulation model, u0 = (0.96, -1.1, 0.5) on [0, 30].
[[nodiscard]] BenchmarkSpec lorenz84(double a = 0.25, double b = 4.0, double F = 8.0,
                                     double G = 1.0);

/// Lorenz 1984 Jacobian; F and G do not enter.
[[nodiscard]] Matrix lorenz84_jacobian(double a, double b, const State& u);

/// Builds a benchmark by CLI name (stiff-linear, flame, robertson, lorenz84)
/// with parameter overrides; unknown names or parameters throw
/// std::invalid_argument.
[[nodiscard]] BenchmarkSpec make_benchmark(const std::string& name,
                                           const std::map<std::string, double>& overrides);

[[nodiscard]] std::vector<std::string> benchmark_names();

/// Eigenvalues of the variational Jacobian at the trajectory sample nearest
/// to each of n_samples equidistant times spanning the trajectory.
[[nodiscard]] LleTrace lle_scan(const BenchmarkSpec& spec, const Trajectory& traj,
                                std::size_t n_samples);

}  // namespace stiffchaos
