#include "stiffchaos/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "stiffchaos/errors.hpp"

namespace stiffchaos {

namespace {

constexpr double kMaxExponent = 700.0;

double guarded_exp(double arg) {
  if (arg > kMaxExponent) throw ExponentOverflow(arg);
  return std::exp(arg);
}

State to_state(const Vec3& v) { return State(v.begin(), v.end()); }
Vec3 to_vec(const State& s) { return {s[0], s[1], s[2]}; }

Vec3 back_transform(const TransformParams& p, double t_local, const Vec3& z) {
  Vec3 x{};
  for (std::size_t i = 0; i < 3; ++i) x[i] = p.eps_scale[i] * std::exp(p.mu[i] * t_local) * z[i];
  return x;
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::none: return "none";
    case Method::fixed_mu: return "1";
    case Method::local_gamma: return "2";
    case Method::cumulative_avg: return "3";
    case Method::window_avg: return "4";
  }
  return "none";
}

Method parse_method(std::string_view s) {
  if (s == "none" || s == "0") return Method::none;
  if (s == "1") return Method::fixed_mu;
  if (s == "2") return Method::local_gamma;
  if (s == "3") return Method::cumulative_avg;
  if (s == "4") return Method::window_avg;
  throw std::invalid_argument("unknown method '" + std::string(s) + "' (expected none,1,2,3,4)");
}

std::string_view to_string(GammaSource g) noexcept {
  return g == GammaSource::jstar ? "jstar" : "untransformed";
}

GammaSource parse_gamma_source(std::string_view s) {
  if (s == "jstar") return GammaSource::jstar;
  if (s == "untransformed") return GammaSource::untransformed;
  throw std::invalid_argument("unknown gamma source '" + std::string(s) + "'");
}

LorenzParams LorenzParams::from(const OdeProblem& problem) {
  return {problem.param("a"), problem.param("b"), problem.param("F"), problem.param("G")};
}

TransformParams TransformParams::defaults(Method m) {
  TransformParams p;
  switch (m) {
    case Method::none: break;
    case Method::fixed_mu: p.mu_init = p.fixed_mu; break;
    case Method::local_gamma:
      p.mu_init = {2.0, 2.0, 2.0};
      p.gamma_source = GammaSource::jstar;
      break;
    case Method::cumulative_avg:
    case Method::window_avg: p.mu_init = {2.16, 1.62, 1.28}; break;
  }
  p.mu = p.mu_init;
  return p;
}

void TransformParams::validate() const {
  for (double e : eps_scale) {
    if (!(e > 0.0)) throw std::invalid_argument("TransformParams: eps_scale must be > 0");
  }
  const auto finite = [](const Vec3& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(mu) || !finite(coeffs) || !finite(mu_init) || !finite(fixed_mu) ||
      !std::isfinite(q)) {
    throw std::invalid_argument("TransformParams: non-finite value");
  }
}

void IntervalPlan::validate() const {
  if (N == 0 || K == 0) throw std::invalid_argument("IntervalPlan: N and K must be >= 1");
  if (N % K != 0) {
    throw std::invalid_argument("IntervalPlan: K=" + std::to_string(K) +
                                " does not divide N=" + std::to_string(N));
  }
  if (!(t_end > t_start)) throw std::invalid_argument("IntervalPlan: t_end must exceed t_start");
}

IntervalPlan IntervalPlan::for_method(Method m, std::size_t N, double t_start, double t_end) {
  std::size_t per = N;
  if (m == Method::fixed_mu || m == Method::local_gamma) per = 10;
  if (m == Method::cumulative_avg || m == Method::window_avg) per = 40;
  IntervalPlan plan{N, std::max<std::size_t>(1, N / per), t_start, t_end};
  return plan;
}

double TransformRun::max_error(std::size_t component) const {
  double m = 0.0;
  for (const auto& e : errors_vs_reference) m = std::max(m, e.at(component));
  return m;
}

double TransformRun::mean_error(std::size_t component) const {
  if (errors_vs_reference.empty()) return 0.0;
  double s = 0.0;
  for (const auto& e : errors_vs_reference) s += e.at(component);
  return s / static_cast<double>(errors_vs_reference.size());
}

Vec3 transformed_rhs(const TransformParams& p, const LorenzParams& lp, double t, const Vec3& z) {
  const auto [m1, m2, m3] = p.mu;
  const auto [e1, e2, e3] = p.eps_scale;
  const auto [z1, z2, z3] = z;
  const double a = lp.a;
  const double b = lp.b;

  const double g12 = guarded_exp((2.0 * m2 - m1) * t);
  const double g13 = guarded_exp((2.0 * m3 - m1) * t);
  const double g1F = guarded_exp(-m1 * t);
  const double g1 = guarded_exp(m1 * t);
  const double g2z = guarded_exp((m1 - m2 + m3) * t);
  const double g2G = guarded_exp(-m2 * t);
  const double g3 = guarded_exp((m1 + m2 - m3) * t);

  // Term order mirrors the untransformed right-hand side so that mu = 0,
  // eps = 1 reproduces it bit for bit.
  const double d1 = -m1 * z1 - (e2 * e2 / e1) * g12 * z2 * z2 - (e3 * e3 / e1) * g13 * z3 * z3 -
                    a * z1 + (a / e1) * g1F * lp.F;
  const double d2 = -m2 * z2 + e1 * g1 * z1 * z2 - b * (e1 * e3 / e2) * g2z * z1 * z3 - z2 +
                    (lp.G / e2) * g2G;
  const double d3 = -m3 * z3 + b * (e1 * e2 / e3) * g3 * z1 * z2 + e1 * g1 * z1 * z3 - z3;
  return {d1, d2, d3};
}

Matrix jstar(const TransformParams& params, const Vec3& z, double a, double b) {
  const auto& e = params.eps_scale;
  const State x{e[0] * z[0], e[1] * z[1], e[2] * z[2]};
  Matrix j = lorenz84_jacobian(a, b, x);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      if (i != k) j(i, k) *= e[k] / e[i];
    }
    j(i, i) -= params.mu[i];
  }
  return j;
}

Vec3 select_mu(Method method, const std::vector<double>& history, const TransformParams& params,
               std::size_t interval) {
  if (method == Method::none) return {0.0, 0.0, 0.0};
  if (method == Method::fixed_mu) return params.fixed_mu;
  if (interval == 0) return params.mu_init;
  if (history.empty()) throw std::invalid_argument("select_mu: empty gamma history");

  double g = 0.0;
  switch (method) {
    case Method::local_gamma: {
      const double v = params.q * history.back();
      return {v, v, v};
    }
    case Method::cumulative_avg:
      g = std::accumulate(history.begin(), history.end(), 0.0) / static_cast<double>(history.size());
      break;
    case Method::window_avg: {
      const std::size_t n = std::min<std::size_t>(2, history.size());
      g = std::accumulate(history.end() - static_cast<std::ptrdiff_t>(n), history.end(), 0.0) /
          static_cast<double>(n);
      break;
    }
    default: break;
  }
  return {params.coeffs[0] * g, params.coeffs[1] * g, params.coeffs[2] * g};
}

TransformRun run_transformed(const BenchmarkSpec& spec, const IntervalPlan& plan, Method method,
                             TransformParams params, const Trajectory& reference) {
  plan.validate();
  params.validate();
  const OdeProblem& problem = spec.problem;
  if (problem.dim != 3) throw std::invalid_argument("run_transformed: needs the lorenz84 problem");
  const LorenzParams lp = LorenzParams::from(problem);
  if (reference.size() != plan.N + 1) {
    throw std::invalid_argument("run_transformed: reference has " +
                                std::to_string(reference.size()) + " samples, expected " +
                                std::to_string(plan.N + 1));
  }

  TransformRun run;
  run.plan = plan;
  run.method = method;
  run.solution.solver_id = SolverId::rk4_fixed;
  run.solution.times.push_back(plan.t_start);
  run.solution.states.push_back(problem.u0);

  const std::size_t m = plan.steps_per_interval();
  const double h = plan.dt();
  Vec3 x = to_vec(problem.u0);
  std::size_t global = 0;

  for (std::size_t k = 0; k < plan.K; ++k) {
    params.mu = select_mu(method, run.gamma_max_history, params, k);
    Vec3 z{};
    for (std::size_t i = 0; i < 3; ++i) z[i] = x[i] / params.eps_scale[i];

    const Matrix jg = params.gamma_source == GammaSource::jstar
                          ? jstar(params, z, lp.a, lp.b)
                          : lorenz84_jacobian(lp.a, lp.b, to_state(x));
    run.gamma_max_history.push_back(local_eigenvalues(jg).gamma_max());
    run.mu_history.push_back(params.mu);

    const RhsFn rhs = [&params, &lp](double t, const State& u) {
      return to_state(transformed_rhs(params, lp, t, to_vec(u)));
    };
    State zs = to_state(z);
    for (std::size_t i = 0; i < m; ++i) {
      zs = rk4_step(rhs, static_cast<double>(i) * h, zs, h);
      ++global;
      const double t_global =
          global == plan.N ? plan.t_end : plan.t_start + static_cast<double>(global) * h;
      x = back_transform(params, static_cast<double>(i + 1) * h, to_vec(zs));
      if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) {
        throw NonFiniteState(t_global, "run_transformed");
      }
      run.solution.times.push_back(t_global);
      run.solution.states.push_back(to_state(x));
    }
  }
  run.solution.steps_taken = plan.N;
  run.params = params;

  for (std::size_t k = 0; k < run.solution.size(); ++k) {
    const double tol = 1e-9 * std::max(1.0, std::abs(run.solution.times[k]));
    if (std::abs(reference.times[k] - run.solution.times[k]) > tol) {
      throw std::invalid_argument("run_transformed: reference grid does not match the run");
    }
    const State& r = reference.states[k];
    const State& s = run.solution.states[k];
    run.errors_vs_reference.push_back(
        {std::abs(s[0] - r[0]), std::abs(s[1] - r[1]), std::abs(s[2] - r[2])});
  }
  return run;
}

StepExtensionReport step_extension_report(const BenchmarkSpec& spec, const TransformRun& run,
                                          const Trajectory& reference, double eps_achieved) {
  StepExtensionReport rep;
  rep.delta = run.plan.dt();
  rep.eps = eps_achieved;
  rep.min_dt_max = std::numeric_limits<double>::infinity();
  for (const auto& c : curvature_along(reference, spec.problem, 2)) {
    const double d = dt_max(c.kappa, eps_achieved);
    rep.points.push_back({c.t, d});
    if (std::isfinite(d)) rep.min_dt_max = std::min(rep.min_dt_max, d);
  }
  return rep;
}

LleTrace jstar_scan(const BenchmarkSpec& spec, const Trajectory& traj,
                    const TransformParams& params, std::size_t n_samples) {
  if (n_samples < 2) throw std::invalid_argument("jstar_scan: n_samples must be >= 2");
  const LorenzParams lp = LorenzParams::from(spec.problem);
  const double t0 = traj.times.front();
  const double t1 = traj.times.back();
  LleTrace trace;
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double t = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(n_samples - 1);
    const State& x = traj.states[traj.nearest_index(t)];
    const Vec3 z{x[0] / params.eps_scale[0], x[1] / params.eps_scale[1],
                 x[2] / params.eps_scale[2]};
    trace.push(local_eigenvalues(jstar(params, z, lp.a, lp.b), t));
  }
  return trace;
}

StiffTransformDemo stiff_transform_demo(double a, double kappa_g, double eps) {
  if (!(a > 0.0)) throw std::invalid_argument("stiff_transform_demo: a must be > 0");
  if (!(kappa_g < 0.0)) throw std::invalid_argument("stiff_transform_demo: kappa_g must be < 0");
  if (!(eps > 0.0)) throw std::invalid_argument("stiff_transform_demo: eps must be > 0");
  StiffTransformDemo d;
  d.a = a;
  d.kappa_g = kappa_g;
  d.eps = eps;
  d.growth_rate = -a - kappa_g;
  if (!(d.growth_rate < 0.0)) {
    throw std::invalid_argument("stiff_transform_demo: need a > |kappa_g| so that A(t) decays");
  }
  d.dt_stiff_u = dt_stiff(-a, eps);
  // A(t) = eps * exp(rate t) has the same shape as a decaying perturbation.
  d.dt_max_z = dt_max(kappa_stiff_sup(d.growth_rate, eps, 0.0), eps);
  return d;
}

}  // namespace stiffchaos
