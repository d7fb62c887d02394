#include <doctest.h>

#include <cmath>
#include <random>

#include "stiffchaos/problems.hpp"

using namespace stiffchaos;

namespace {

Matrix fd_jacobian(const OdeProblem& p, double t, const State& u) {
  Matrix j(p.dim, p.dim);
  for (std::size_t c = 0; c < p.dim; ++c) {
    const double h = 1e-6 * std::max(std::abs(u[c]), 1e-3);
    State up = u;
    State um = u;
    up[c] += h;
    um[c] -= h;
    const State fp = p.rhs(t, up);
    const State fm = p.rhs(t, um);
    for (std::size_t r = 0; r < p.dim; ++r) j(r, c) = (fp[r] - fm[r]) / (2.0 * h);
  }
  return j;
}

double max_entry(const Matrix& m) {
  double v = 0.0;
  for (double x : m.data()) v = std::max(v, std::abs(x));
  return v;
}

// 100 states drawn from a trajectory of the problem.
std::vector<std::pair<double, State>> draw_states(const BenchmarkSpec& spec) {
  Trajectory tr;
  if (spec.exact) {
    for (std::size_t k = 0; k <= 400; ++k) {
      const double t = spec.problem.t_start + spec.problem.span() * static_cast<double>(k) / 400.0;
      tr.times.push_back(t);
      tr.states.push_back((*spec.exact)(t));
    }
  } else if (spec.problem.name == "robertson") {
    AdaptiveConfig cfg;
    cfg.dt_init = 0.1;
    tr = solve_trapezoid_adaptive(spec.problem, cfg);
  } else {
    tr = solve_rk4_fixed(spec.problem, 3000);
  }
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> pick(0, tr.size() - 1);
  std::vector<std::pair<double, State>> out;
  for (int i = 0; i < 100; ++i) {
    const std::size_t k = pick(rng);
    out.emplace_back(tr.times[k], tr.states[k]);
  }
  return out;
}

std::vector<BenchmarkSpec> all_benchmarks() {
  return {stiff_linear(300.0, 1.05), flame(0.01), robertson(), lorenz84()};
}

}  // namespace

TEST_SUITE("problems") {
  TEST_CASE("analytic Jacobians match finite differences") {
    for (const auto& spec : all_benchmarks()) {
      CAPTURE(spec.problem.name);
      for (const auto& [t, u] : draw_states(spec)) {
        const Matrix ja = spec.problem.jacobian(t, u);
        const Matrix jf = fd_jacobian(spec.problem, t, u);
        const double scale = std::max(1.0, max_entry(ja));
        for (std::size_t i = 0; i < ja.data().size(); ++i) {
          CHECK(std::abs(ja.data()[i] - jf.data()[i]) <= 1e-5 * scale);
        }
        CHECK(spec.variational_jacobian(t, u) == ja);
      }
    }
  }

  TEST_CASE("registry builds every benchmark") {
    for (const auto& name : benchmark_names()) {
      const auto spec = make_benchmark(name, {});
      CHECK(spec.problem.name == name);
      CHECK_NOTHROW(spec.problem.validate());
    }
    CHECK(make_benchmark("stiff-linear", {{"a", 50.0}}).problem.param("a") == 50.0);
    CHECK_THROWS_AS((void)make_benchmark("nope", {}), std::invalid_argument);
    CHECK_THROWS_AS((void)make_benchmark("lorenz84", {{"zeta", 1.0}}), std::invalid_argument);
  }

  TEST_CASE("stiff linear exact solution") {
    const auto spec = stiff_linear(300.0, 1.05);
    for (double t : {0.0, 0.001, 0.004, 0.01, 0.5, 1.0}) {
      const double u = (*spec.exact)(t)[0];
      CHECK(u == doctest::Approx(1.0 + t + 0.05 * std::exp(-300.0 * t)).epsilon(1e-15));
      const double du = 1.0 - 300.0 * 0.05 * std::exp(-300.0 * t);
      CHECK(std::abs(du - spec.problem.rhs(t, {u})[0]) <= 1e-8);
    }
    CHECK((*stiff_linear(300.0).exact)(1.0)[0] == 2.0);
  }

  TEST_CASE("stiff linear perturbation decays as exp(-a t)") {
    const auto spec = stiff_linear(300.0);
    OdeProblem var;
    var.name = "variational";
    var.dim = 1;
    var.rhs = [&spec](double t, const State& d) {
      return multiply(spec.variational_jacobian(t, {1.0 + t}), d);
    };
    var.u0 = {1.0};
    var.t_end = 0.01;
    const Trajectory tr = solve_rk4_fixed(var, 10000);
    CHECK(std::abs(tr.back()[0] - std::exp(-3.0)) <= 1e-9);
  }

  TEST_CASE("flame exact solution satisfies the ODE and the implicit relation") {
    const double d = 0.01;
    const auto spec = flame(d);
    const double rhs0 = 1.0 / d + std::log((1.0 - d) / d);
    for (double t = 0.0; t <= 110.0; t += 0.5) {
      const double u = flame_exact(d, t, 1e-12);
      CHECK(std::abs(1.0 / u + std::log((1.0 - u) / u) - (rhs0 - t)) <= 1e-8);

      const double h = 1e-2;
      const double du = (-flame_exact(d, t + 2 * h) + 8.0 * flame_exact(d, t + h) -
                         8.0 * flame_exact(d, t - h) + flame_exact(d, t - 2 * h)) /
                        (12.0 * h);
      if (t >= 2 * h) CHECK(std::abs(du - spec.problem.rhs(t, {flame_exact(d, t)})[0]) <= 1e-8);
    }
  }

  TEST_CASE("flame examples") {
    const auto spec = flame(0.01);
    CHECK(spec.problem.t_end == 200.0);
    CHECK(flame_exact(0.01, 50.0) < 0.02);
    CHECK(flame_exact(0.01, 150.0) > 0.99);
    CHECK(flame_exact(0.01, 95.0) < 0.5);
    CHECK(flame_exact(0.01, 105.0) > 0.5);
    CHECK(spec.problem.rhs(0.0, {1.0})[0] == 0.0);
    CHECK(spec.variational_jacobian(0.0, {1.0})(0, 0) == -1.0);
    const auto half = flame(0.5);
    CHECK(half.problem.u0[0] == 0.5);
    CHECK(half.problem.rhs(0.0, half.problem.u0)[0] == 0.125);
  }

  TEST_CASE("robertson examples") {
    const auto spec = robertson();
    const Matrix j = spec.problem.jacobian(0.0, {1.0, 0.0, 0.0});
    CHECK(j == Matrix{{-0.04, 0.0, 0.0}, {0.04, 0.0, 0.0}, {0.0, 0.0, 0.0}});

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      const State f = spec.problem.rhs(0.0, {u(rng), 1e-4 * u(rng), u(rng)});
      CHECK(std::abs(f[0] + f[1] + f[2]) <= 1e-12 * (std::abs(f[0]) + std::abs(f[1]) + 1.0));
    }

    AdaptiveConfig cfg;
    cfg.dt_init = 0.1;
    const Trajectory tr = solve_trapezoid_adaptive(spec.problem, cfg);
    CHECK(std::abs(tr.back()[2] - 1.0) <= 1e-2);
    CHECK(std::abs(tr.back()[0]) <= 1e-2);

    // extreme stiffness once y exceeds 0.4e-4
    const EigenSet e = local_eigenvalues(spec.variational_jacobian(0.0, {1.0, 0.41e-4, 0.0}));
    CHECK(e.gamma_min() <= -2400.0);

    // gamma_min passes -2400 along the solution at later times
    double gmin = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
      if (tr.times[k] >= 10.0) {
        gmin = std::min(gmin, local_eigenvalues(spec.variational_jacobian(0.0, tr.states[k])).gamma_min());
      }
    }
    CHECK(gmin < -2400.0);
  }

  TEST_CASE("lorenz84 examples") {
    const auto spec = lorenz84();
    const Matrix j = spec.problem.jacobian(0.0, spec.problem.u0);
    CHECK(j(1, 2) == doctest::Approx(-4.0 * 0.96));
    CHECK(j(1, 2) == doctest::Approx(-3.84));
    CHECK(j(0, 0) == -0.25);

    const auto strong = lorenz84(3.1);
    const EigenSet e = local_eigenvalues(strong.variational_jacobian(0.0, strong.problem.u0));
    for (const auto& g : e.values) CHECK(g.real() <= 0.0);
  }

  TEST_CASE("lorenz84 LLE scan is mostly chaotic with a gap near t=14") {
    const auto spec = lorenz84();
    const Trajectory ref = reference_solution(spec.problem, 600, 1024);
    const LleTrace scan = lle_scan(spec, ref, 400);
    REQUIRE(scan.size() == 400);
    CHECK(scan.chaotic_fraction() > 0.9);
    bool gap = false;
    for (std::size_t k = 0; k < scan.size(); ++k) {
      CHECK(scan.gamma_min[k] <= scan.gamma_max[k]);
      const double t = scan.samples[k].t;
      if (t >= 13.0 && t <= 15.0 && scan.gamma_max[k] <= 0.0) gap = true;
    }
    CHECK(gap);

    // F and G do not enter the Jacobian
    const LleTrace other = lle_scan(lorenz84(0.25, 4.0, 3.0, 5.0), ref, 400);
    CHECK(other.gamma_max == scan.gamma_max);
    CHECK(other.gamma_min == scan.gamma_min);
    for (std::size_t k = 0; k < scan.size(); ++k) CHECK(other.samples[k].values == scan.samples[k].values);
  }

  TEST_CASE("stiff linear has the single exponent -a") {
    const auto spec = stiff_linear(300.0);
    for (double t : {0.0, 0.3, 1.0}) {
      const EigenSet e = local_eigenvalues(spec.variational_jacobian(t, (*spec.exact)(t)));
      REQUIRE(e.values.size() == 1);
      CHECK(e.values[0] == Complex(-300.0, 0.0));
    }
  }
}
