#include "stiffchaos/problems.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace stiffchaos {

namespace {

RhsFn zero_dfdt(std::size_t dim) {
  return [dim](double, const State&) { return State(dim, 0.0); };
}

void check_keys(const std::string& name, const std::map<std::string, double>& overrides,
                const std::set<std::string>& allowed) {
  for (const auto& [key, value] : overrides) {
    if (!allowed.contains(key)) {
      throw std::invalid_argument("problem '" + name + "' has no parameter '" + key + "'");
    }
    if (!std::isfinite(value)) {
      throw std::invalid_argument("problem '" + name + "': parameter '" + key + "' not finite");
    }
  }
}

double get_or(const std::map<std::string, double>& m, const std::string& key, double fallback) {
  const auto it = m.find(key);
  return it == m.end() ? fallback : it->second;
}

}  // namespace

BenchmarkSpec stiff_linear(double a, double u0, double t_end) {
  if (!(a > 0.0)) throw std::invalid_argument("stiff_linear: a must be > 0");
  BenchmarkSpec spec;
  OdeProblem& p = spec.problem;
  p.name = "stiff-linear";
  p.dim = 1;
  p.params = {{"a", a}, {"u0", u0}};
  p.rhs = [a](double t, const State& u) { return State{-a * u[0] + a * t + a + 1.0}; };
  p.jacobian = [a](double, const State&) { return Matrix{{-a}}; };
  p.dfdt = [a](double, const State&) { return State{a}; };
  p.u0 = {u0};
  p.t_start = 0.0;
  p.t_end = t_end;
  spec.variational_jacobian = p.jacobian;
  const double c = u0 - 1.0;
  spec.exact = [a, c](double t) { return State{1.0 + t + c * std::exp(-a * t)}; };
  spec.default_eps = 1e-3;
  return spec;
}

double flame_exact(double d, double t, double tol) {
  const auto g = [](double u) { return 1.0 / u + std::log((1.0 - u) / u); };
  const double target = g(d) - t;
  // g decreases monotonically on (0,1).
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (g(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

BenchmarkSpec flame(double d) {
  if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument("flame: d must lie in (0,1)");
  BenchmarkSpec spec;
  OdeProblem& p = spec.problem;
  p.name = "flame";
  p.dim = 1;
  p.params = {{"d", d}};
  p.rhs = [](double, const State& u) { return State{u[0] * u[0] - u[0] * u[0] * u[0]}; };
  p.jacobian = [](double, const State& u) { return Matrix{{2.0 * u[0] - 3.0 * u[0] * u[0]}}; };
  p.dfdt = zero_dfdt(1);
  p.u0 = {d};
  p.t_start = 0.0;
  p.t_end = 2.0 / d;
  spec.variational_jacobian = p.jacobian;
  spec.exact = [d](double t) { return State{flame_exact(d, t)}; };
  spec.default_eps = 1e-3;
  return spec;
}

BenchmarkSpec robertson(double a, double b, double c) {
  if (!(a > 0.0 && b > 0.0 && c > 0.0)) {
    throw std::invalid_argument("robertson: a, b, c must be > 0");
  }
  BenchmarkSpec spec;
  OdeProblem& p = spec.problem;
  p.name = "robertson";
  p.dim = 3;
  p.params = {{"a", a}, {"b", b}, {"c", c}};
  p.rhs = [a, b, c](double, const State& u) {
    const double x = u[0], y = u[1], z = u[2];
    return State{-a * x + b * y * z, a * x - b * y * z - c * y * y, c * y * y};
  };
  p.jacobian = [a, b, c](double, const State& u) {
    const double y = u[1], z = u[2];
    return Matrix{{-a, b * z, b * y}, {a, -b * z - 2.0 * c * y, -b * y}, {0.0, 2.0 * c * y, 0.0}};
  };
  p.dfdt = zero_dfdt(3);
  p.u0 = {1.0, 0.0, 0.0};
  p.t_start = 1e-6;
  p.t_end = 1e6;
  spec.variational_jacobian = p.jacobian;
  spec.default_eps = 1e-3;
  return spec;
}

Matrix lorenz84_jacobian(double a, double b, const State& u) {
  const double x = u[0], y = u[1], z = u[2];
  return Matrix{{-a, -2.0 * y, -2.0 * z}, {y - b * z, x - 1.0, -b * x}, {b * y + z, b * x, x - 1.0}};
}

BenchmarkSpec lorenz84(double a, double b, double F, double G) {
  BenchmarkSpec spec;
  OdeProblem& p = spec.problem;
  p.name = "lorenz84";
  p.dim = 3;
  p.params = {{"a", a}, {"b", b}, {"F", F}, {"G", G}};
  p.rhs = [a, b, F, G](double, const State& u) {
    const double x = u[0], y = u[1], z = u[2];
    return State{-y * y - z * z - a * x + a * F, x * y - b * x * z - y + G, b * x * y + x * z - z};
  };
  p.jacobian = [a, b](double, const State& u) { return lorenz84_jacobian(a, b, u); };
  p.dfdt = zero_dfdt(3);
  p.u0 = {0.96, -1.1, 0.5};
  p.t_start = 0.0;
  p.t_end = 30.0;
  spec.variational_jacobian = p.jacobian;
  spec.default_eps = 0.012;
  return spec;
}

std::vector<std::string> benchmark_names() {
  return {"stiff-linear", "flame", "robertson", "lorenz84"};
}

BenchmarkSpec make_benchmark(const std::string& name,
                             const std::map<std::string, double>& overrides) {
  if (name == "stiff-linear") {
    check_keys(name, overrides, {"a", "u0"});
    return stiff_linear(get_or(overrides, "a", 300.0), get_or(overrides, "u0", 1.0));
  }
  if (name == "flame") {
    check_keys(name, overrides, {"d"});
    return flame(get_or(overrides, "d", 0.01));
  }
  if (name == "robertson") {
    check_keys(name, overrides, {"a", "b", "c"});
    return robertson(get_or(overrides, "a", 0.04), get_or(overrides, "b", 1e4),
                     get_or(overrides, "c", 3e7));
  }
  if (name == "lorenz84") {
    check_keys(name, overrides, {"a", "b", "F", "G"});
    return lorenz84(get_or(overrides, "a", 0.25), get_or(overrides, "b", 4.0),
                    get_or(overrides, "F", 8.0), get_or(overrides, "G", 1.0));
  }
  throw std::invalid_argument("unknown problem '" + name + "'");
}

LleTrace lle_scan(const BenchmarkSpec& spec, const Trajectory& traj, std::size_t n_samples) {
  if (n_samples < 2) throw std::invalid_argument("lle_scan: n_samples must be >= 2");
  if (traj.size() == 0) throw std::invalid_argument("lle_scan: empty trajectory");
  const double t0 = traj.times.front();
  const double t1 = traj.times.back();
  LleTrace trace;
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double t = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(n_samples - 1);
    const std::size_t i = traj.nearest_index(t);
    trace.push(local_eigenvalues(spec.variational_jacobian(traj.times[i], traj.states[i]), t));
  }
  return trace;
}

}  // namespace stiffchaos
