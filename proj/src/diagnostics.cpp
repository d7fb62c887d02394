#include "stiffchaos/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "stiffchaos/errors.hpp"

namespace stiffchaos {

namespace {

const double kSqrt2 = std::numbers::sqrt2;
const double kSqrt3 = std::numbers::sqrt3;

struct Derivs {
  double d1;
  double d2;
};

// First and second derivative at x of the parabola through three samples.
Derivs parabola_derivs(const double* ts, const double* us, double x) {
  Derivs d{0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    const int i = (k + 1) % 3;
    const int j = (k + 2) % 3;
    const double denom = (ts[k] - ts[i]) * (ts[k] - ts[j]);
    d.d1 += us[k] * ((x - ts[i]) + (x - ts[j])) / denom;
    d.d2 += us[k] * 2.0 / denom;
  }
  return d;
}

}  // namespace

double EigenSet::gamma_max() const {
  if (values.empty()) throw std::logic_error("EigenSet: empty");
  double m = values.front().real();
  for (const auto& v : values) m = std::max(m, v.real());
  return m;
}

double EigenSet::gamma_min() const {
  if (values.empty()) throw std::logic_error("EigenSet: empty");
  double m = values.front().real();
  for (const auto& v : values) m = std::min(m, v.real());
  return m;
}

void LleTrace::push(EigenSet set) {
  gamma_max.push_back(set.gamma_max());
  gamma_min.push_back(set.gamma_min());
  samples.push_back(std::move(set));
}

double LleTrace::chaotic_fraction() const {
  if (gamma_max.empty()) return 0.0;
  const auto n = std::count_if(gamma_max.begin(), gamma_max.end(), [](double g) { return g > 0.0; });
  return static_cast<double>(n) / static_cast<double>(gamma_max.size());
}

EigenSet local_eigenvalues(const Matrix& jac, double t) { return EigenSet{eigenvalues(jac), t}; }

double curvature(double u_prime, double u_double_prime) {
  const double s = 1.0 + u_prime * u_prime;
  return std::abs(u_double_prime) / (s * std::sqrt(s));
}

std::vector<CurvaturePoint> curvature_along(const Trajectory& traj, const OdeProblem& problem,
                                            std::size_t component) {
  const std::size_t n = traj.size();
  if (n < 5) throw InsufficientSamples("curvature_along: need at least 5 samples");
  if (component >= problem.dim) throw std::out_of_range("curvature_along: component out of range");
  std::vector<CurvaturePoint> out(n);

  if (problem.jacobian && problem.dfdt) {
    for (std::size_t k = 0; k < n; ++k) {
      const double t = traj.times[k];
      const State& u = traj.states[k];
      const State f = problem.rhs(t, u);
      const State ft = problem.dfdt(t, u);
      const Matrix j = problem.jacobian(t, u);
      double upp = ft[component];
      for (std::size_t c = 0; c < problem.dim; ++c) upp += j(component, c) * f[c];
      out[k] = {t, curvature(f[component], upp)};
    }
    return out;
  }

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t c = std::clamp<std::size_t>(k, 1, n - 2);
    const double ts[3] = {traj.times[c - 1], traj.times[c], traj.times[c + 1]};
    const double us[3] = {traj.states[c - 1][component], traj.states[c][component],
                          traj.states[c + 1][component]};
    const Derivs d = parabola_derivs(ts, us, traj.times[k]);
    out[k] = {traj.times[k], curvature(d.d1, d.d2)};
  }
  return out;
}

double dt_max(double kappa, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("dt_max: eps must be > 0");
  if (kappa == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * kSqrt2 * std::sqrt(eps / kappa);
}

double kappa_stiff(double gamma, double eps, double t_star) {
  if (!(eps > 0.0)) throw std::invalid_argument("kappa_stiff: eps must be > 0");
  const double e = std::exp(gamma * t_star);
  const double s = 1.0 + eps * eps * gamma * gamma * e * e;
  return eps * gamma * gamma * e / (s * std::sqrt(s));
}

double t_star_max(double gamma, double eps) {
  return -std::log(2.0 * gamma * gamma * eps * eps) / (2.0 * gamma);
}

double kappa_stiff_sup(double gamma, double eps, double t_star) {
  if (!(gamma < 0.0)) throw NonNegativeGamma(gamma);
  return kappa_stiff(gamma, eps, std::max(t_star, t_star_max(gamma, eps)));
}

double dt_stiff(double gamma, double eps) {
  if (!(gamma < 0.0)) throw NonNegativeGamma(gamma);
  if (!(eps > 0.0)) throw std::invalid_argument("dt_stiff: eps must be > 0");
  const double g = std::abs(gamma);
  if (2.0 * gamma * gamma * eps * eps >= 1.0) return 6.0 * std::sqrt(eps / (kSqrt3 * g));
  return 2.0 * kSqrt2 / g * std::pow(1.0 + eps * eps * gamma * gamma, 0.75);
}

double dt_stiff_at(double gamma, double eps, double t_star) {
  if (t_star <= 0.0) return dt_stiff(gamma, eps);
  return dt_max(kappa_stiff_sup(gamma, eps, t_star), eps);
}

double q_ratio(double dt_max_value, double dt_stiff_value, double cap) {
  if (std::isnan(dt_stiff_value)) return 0.0;
  const double num = std::isinf(dt_max_value) ? cap : dt_max_value;
  return num / dt_stiff_value;
}

double r_ratio(double gamma_min, double kappa) {
  if (kappa == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::abs(gamma_min) / kappa;
}

StiffnessReport stiffness_report(const Trajectory& traj, const OdeProblem& problem,
                                 const MatrixFn& variational_jac, double eps,
                                 std::size_t component, double t_from, double t_to) {
  if (!(eps > 0.0)) throw std::invalid_argument("stiffness_report: eps must be > 0");
  const auto kappas = curvature_along(traj, problem, component);

  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (traj.times[k] >= t_from && traj.times[k] <= t_to) idx.push_back(k);
  }
  if (idx.empty()) throw InsufficientSamples("stiffness_report: no samples in window");

  StiffnessReport rep;
  rep.eps = eps;
  rep.t_origin = traj.times[idx.front()];
  rep.window = traj.times[idx.back()] - rep.t_origin;
  if (rep.window <= 0.0) rep.window = problem.span();

  for (const std::size_t k : idx) {
    StiffnessSample s;
    s.t = traj.times[k];
    s.kappa = kappas[k].kappa;
    s.gamma_min = local_eigenvalues(variational_jac(s.t, traj.states[k]), s.t).gamma_min();
    s.dt_max = dt_max(s.kappa, eps);
    s.dt_stiff = s.gamma_min < 0.0 ? dt_stiff_at(s.gamma_min, eps, s.t - rep.t_origin)
                                   : std::numeric_limits<double>::quiet_NaN();
    s.Q = q_ratio(s.dt_max, s.dt_stiff, rep.window);
    s.R = r_ratio(s.gamma_min, s.kappa);
    rep.samples.push_back(s);
  }
  return rep;
}

}  // namespace stiffchaos
