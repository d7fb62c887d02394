#include "stiffchaos/ode_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stiffchaos/errors.hpp"

namespace stiffchaos {

namespace {

constexpr double kSafety = 0.9;
constexpr double kShrinkLimit = 0.25;
constexpr double kGrowLimit = 4.0;
constexpr int kNewtonMaxIter = 25;

// Error estimate relative to the local magnitude of each component.
double scaled_norm(const State& diff, const State& u, const State& w, double atol) {
  double m = 0.0;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    const double scale = std::max(std::abs(u[i]), std::abs(w[i])) + atol;
    m = std::max(m, std::abs(diff[i]) / scale);
  }
  return m;
}

double step_factor(double est, double tol, double exponent) {
  if (est == 0.0) return kGrowLimit;
  return std::clamp(kSafety * std::pow(tol / est, exponent), kShrinkLimit, kGrowLimit);
}

void axpy(State& y, double a, const State& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

Trajectory start_trajectory(const OdeProblem& problem, SolverId id) {
  Trajectory tr;
  tr.solver_id = id;
  tr.times.push_back(problem.t_start);
  tr.states.push_back(problem.u0);
  return tr;
}

using StepFn = std::function<std::optional<State>(double t, const State& u, double h)>;

// Shared step-doubling driver. `divisor` turns |full - half| into the error
// estimate; `exponent` is 1/(order+1).
Trajectory adaptive_driver(const OdeProblem& problem, const AdaptiveConfig& cfg, SolverId id,
                           const StepFn& step, double divisor, double exponent,
                           bool throw_on_failure) {
  problem.validate();
  cfg.validate();
  Trajectory tr = start_trajectory(problem, id);
  State u = problem.u0;
  double t = problem.t_start;
  double dt = cfg.dt_init;
  const double t_end = problem.t_end;
  bool last_failed_newton = false;

  while (t < t_end) {
    if (tr.steps_taken >= cfg.max_steps) {
      tr.stagnation = Stagnation{t, tr.steps_taken, StagnationReason::max_steps};
      break;
    }
    dt = std::min({dt, cfg.dt_max, t_end - t});
    double est = std::numeric_limits<double>::infinity();
    std::optional<State> half;
    last_failed_newton = false;
    const auto full = step(t, u, dt);
    if (full) {
      const auto mid = step(t, u, 0.5 * dt);
      if (mid) half = step(t + 0.5 * dt, *mid, 0.5 * dt);
    }
    if (full && half && all_finite(*full) && all_finite(*half)) {
      State diff = *half;
      axpy(diff, -1.0, *full);
      est = scaled_norm(diff, u, *half, cfg.atol) / divisor;
    } else if (!full || !half) {
      last_failed_newton = true;
    }
    if (!std::isfinite(est)) est = std::numeric_limits<double>::max();

    if (est <= cfg.tol) {
      // Land exactly on t_end to avoid a trailing sliver step.
      t = (t_end - t <= dt) ? t_end : t + dt;
      u = std::move(*half);
      tr.times.push_back(t);
      tr.states.push_back(u);
      ++tr.steps_taken;
      dt *= step_factor(est, cfg.tol, exponent);
    } else {
      ++tr.steps_rejected;
      dt *= step_factor(est, cfg.tol, exponent);
      if (dt < cfg.dt_min) {
        if (throw_on_failure && last_failed_newton) {
          throw NewtonDivergence("trapezoid: Newton iteration failed down to dt_min at t=" +
                                 std::to_string(t));
        }
        tr.stagnation = Stagnation{t, tr.steps_taken, StagnationReason::dt_min};
        break;
      }
    }
  }
  return tr;
}

}  // namespace

void OdeProblem::validate() const {
  if (dim == 0) throw std::invalid_argument(name + ": dim must be >= 1");
  if (u0.size() != dim) throw std::invalid_argument(name + ": u0 size does not match dim");
  if (!(t_end > t_start)) throw std::invalid_argument(name + ": t_end must exceed t_start");
  if (!rhs) throw std::invalid_argument(name + ": rhs missing");
  if (!all_finite(u0)) throw std::invalid_argument(name + ": u0 not finite");
}

double OdeProblem::param(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw std::out_of_range(name + ": no parameter '" + key + "'");
  return it->second;
}

std::string_view to_string(SolverId id) noexcept {
  switch (id) {
    case SolverId::rk4_fixed: return "rk4_fixed";
    case SolverId::rk4_adaptive: return "rk4_adaptive";
    case SolverId::trapezoid_adaptive: return "trapezoid_adaptive";
  }
  return "unknown";
}

std::size_t Trajectory::nearest_index(double t) const {
  if (times.empty()) throw std::logic_error("nearest_index on empty trajectory");
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0;
  if (it == times.end()) return times.size() - 1;
  const auto hi = static_cast<std::size_t>(it - times.begin());
  return (t - times[hi - 1] <= times[hi] - t) ? hi - 1 : hi;
}

void AdaptiveConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("AdaptiveConfig: tol must be > 0");
  if (!(atol >= 0.0)) throw std::invalid_argument("AdaptiveConfig: atol must be >= 0");
  if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max)) {
    throw std::invalid_argument("AdaptiveConfig: need 0 < dt_min <= dt_init <= dt_max");
  }
  if (max_steps == 0) throw std::invalid_argument("AdaptiveConfig: max_steps must be >= 1");
}

State rk4_step(const RhsFn& rhs, double t, const State& u, double h) {
  const std::size_t n = u.size();
  const State k1 = rhs(t, u);
  State tmp(n);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
  const State k2 = rhs(t + 0.5 * h, tmp);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
  const State k3 = rhs(t + 0.5 * h, tmp);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + h * k3[i];
  const State k4 = rhs(t + h, tmp);
  State out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = u[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

Trajectory solve_rk4_strided(const OdeProblem& problem, std::size_t n_steps, std::size_t stride) {
  problem.validate();
  if (n_steps == 0) throw std::invalid_argument("solve_rk4: n_steps must be >= 1");
  if (stride == 0) throw std::invalid_argument("solve_rk4: stride must be >= 1");
  Trajectory tr = start_trajectory(problem, SolverId::rk4_fixed);
  const double h = problem.span() / static_cast<double>(n_steps);
  State u = problem.u0;
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = problem.t_start + static_cast<double>(k) * h;
    u = rk4_step(problem.rhs, t, u, h);
    if (!all_finite(u)) throw NonFiniteState(t + h, "rk4");
    if ((k + 1) % stride == 0 || k + 1 == n_steps) {
      tr.times.push_back(k + 1 == n_steps ? problem.t_end
                                          : problem.t_start + static_cast<double>(k + 1) * h);
      tr.states.push_back(u);
    }
  }
  tr.steps_taken = n_steps;
  return tr;
}

Trajectory solve_rk4_fixed(const OdeProblem& problem, std::size_t n_steps) {
  return solve_rk4_strided(problem, n_steps, 1);
}

Trajectory solve_rk4_adaptive(const OdeProblem& problem, const AdaptiveConfig& cfg) {
  const StepFn step = [&](double t, const State& u, double h) -> std::optional<State> {
    return rk4_step(problem.rhs, t, u, h);
  };
  return adaptive_driver(problem, cfg, SolverId::rk4_adaptive, step, 1.0, 0.2, false);
}

std::optional<State> trapezoid_step(const OdeProblem& problem, double t, const State& u, double h,
                                    double newton_tol, double atol) {
  const std::size_t n = u.size();
  const State fu = problem.rhs(t, u);
  State w = u;
  axpy(w, h, fu);  // explicit Euler predictor
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    const State fw = problem.rhs(t + h, w);
    State r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = w[i] - u[i] - 0.5 * h * (fu[i] + fw[i]);
    if (!all_finite(r)) return std::nullopt;
    if (scaled_norm(r, u, w, atol) <= newton_tol) return w;
    Matrix m = problem.jacobian(t + h, w);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) m(i, j) = (i == j ? 1.0 : 0.0) - 0.5 * h * m(i, j);
    }
    for (double& v : r) v = -v;
    State d;
    try {
      d = solve_linear(std::move(m), std::move(r));
    } catch (const std::runtime_error&) {
      return std::nullopt;
    }
    axpy(w, 1.0, d);
  }
  return std::nullopt;
}

Trajectory solve_trapezoid_adaptive(const OdeProblem& problem, const AdaptiveConfig& cfg) {
  if (!problem.jacobian) throw std::invalid_argument(problem.name + ": trapezoid needs a Jacobian");
  const double newton_tol = cfg.tol / 10.0;
  const StepFn step = [&](double t, const State& u, double h) {
    return trapezoid_step(problem, t, u, h, newton_tol, cfg.atol);
  };
  return adaptive_driver(problem, cfg, SolverId::trapezoid_adaptive, step, 3.0, 1.0 / 3.0, true);
}

Trajectory reference_solution(const OdeProblem& problem, std::size_t base_steps,
                              std::size_t refinement, double threshold) {
  if (base_steps == 0) throw std::invalid_argument("reference_solution: base_steps must be >= 1");
  if (refinement < 16) throw std::invalid_argument("reference_solution: refinement must be >= 16");
  const Trajectory fine = solve_rk4_strided(problem, base_steps * refinement, refinement);
  const Trajectory finer = solve_rk4_strided(problem, base_steps * 2 * refinement, 2 * refinement);
  double change = 0.0;
  for (std::size_t k = 0; k < fine.size(); ++k) {
    change = std::max(change, max_abs_diff(fine.states[k], finer.states[k]));
  }
  if (!(change < threshold)) throw OracleNotConverged(change, threshold);
  return finer;
}

}  // namespace stiffchaos
