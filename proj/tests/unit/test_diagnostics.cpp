#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "stiffchaos/diagnostics.hpp"
#include "stiffchaos/errors.hpp"
#include "stiffchaos/problems.hpp"

using namespace stiffchaos;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t n, double range) {
  std::uniform_real_distribution<double> dist(-range, range);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = dist(rng);
  return m;
}

std::vector<Complex> eigen_oracle(const Matrix& m) {
  const auto n = static_cast<Eigen::Index>(m.rows());
  Eigen::MatrixXd e(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      e(i, j) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  Eigen::EigenSolver<Eigen::MatrixXd> es(e, false);
  std::vector<Complex> out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

// Largest distance from an oracle eigenvalue to its greedily matched partner.
double match_distance(std::vector<Complex> ours, const std::vector<Complex>& oracle) {
  double worst = 0.0;
  for (const Complex& z : oracle) {
    auto it = std::min_element(ours.begin(), ours.end(), [&](const Complex& a, const Complex& b) {
      return std::abs(a - z) < std::abs(b - z);
    });
    worst = std::max(worst, std::abs(*it - z));
    ours.erase(it);
  }
  return worst;
}

double max_modulus(const std::vector<Complex>& v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

// sum_k |c_k| |x|^k, the magnitude against which rounding in p(x) is measured.
double poly_scale(const std::vector<double>& p, double x) {
  double s = 0.0;
  for (double c : p) s = s * x + std::abs(c);
  return s;
}

Trajectory sample(const std::function<State(double)>& f, double t0, double t1, std::size_t n) {
  Trajectory tr;
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(n);
    tr.times.push_back(t);
    tr.states.push_back(f(t));
  }
  return tr;
}

}  // namespace

TEST_SUITE("diagnostics") {
  TEST_CASE("paper eigenvalue examples") {
    const auto rob = robertson();
    const EigenSet r0 = local_eigenvalues(rob.variational_jacobian(0.0, {1.0, 0.0, 0.0}));
    REQUIRE(r0.values.size() == 3);
    CHECK(std::abs(r0.values[0]) < 1e-6);
    CHECK(std::abs(r0.values[1]) < 1e-6);
    CHECK(std::abs(r0.values[2] - Complex(-0.04, 0.0)) < 1e-6);

    const EigenSet r1 = local_eigenvalues(rob.variational_jacobian(0.0, {1.0, 1e-6, 0.0}));
    CHECK(r1.gamma_min() == doctest::Approx(-60.0).epsilon(0.1));
    CHECK(std::abs(r1.values[0].real()) < 1e-3);

    const auto lor = lorenz84();
    const EigenSet l = local_eigenvalues(lor.variational_jacobian(0.0, lor.problem.u0));
    CHECK(std::abs(l.values[0].real() - 1.9) <= 0.1);
    CHECK(std::abs(l.values[0].imag()) <= 1e-12);
    CHECK(std::abs(l.values[1].real() + 1.1) <= 0.1);
    CHECK(std::abs(std::abs(l.values[1].imag()) - 4.5) <= 0.1);
    CHECK(l.values[1] == std::conj(l.values[2]));
  }

  TEST_CASE("random 3x3 eigenvalues: residual, conjugate pairs, trace, oracle") {
    std::mt19937_64 rng(20240601);
    for (int trial = 0; trial < 1000; ++trial) {
      const Matrix m = random_matrix(rng, 3, 1e4);
      const auto ev = eigenvalues(m);
      REQUIRE(ev.size() == 3);
      const auto p = characteristic_polynomial(m);
      const double scale = max_modulus(ev);

      double imag_sum = 0.0;
      Complex sum = 0.0;
      for (const auto& g : ev) {
        CHECK(std::abs(eval_poly(p, g)) <= 1e-8 * poly_scale(p, std::abs(g)));
        imag_sum += g.imag();
        sum += g;
      }
      CHECK(std::abs(imag_sum) <= 1e-9 * scale);
      CHECK(std::abs(sum.real() - m.trace()) <= 1e-8 * std::max({1.0, std::abs(m.trace()), scale}));
      CHECK(match_distance(ev, eigen_oracle(m)) <= 1e-6 * std::max(1.0, scale));
      for (std::size_t i = 1; i < ev.size(); ++i) CHECK(ev[i - 1].real() >= ev[i].real());
    }
  }

  // The absolute bound |p(g)| <= 1e-8 (1+|g|)^3 is below double rounding for
  // small roots of matrices with entries near 1e4; kept as a known failure.
  TEST_CASE("absolute residual bound on random 3x3 matrices" * doctest::may_fail()) {
    std::mt19937_64 rng(20240601);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const Matrix m = random_matrix(rng, 3, 1e4);
      const auto p = characteristic_polynomial(m);
      for (const auto& g : eigenvalues(m)) {
        if (std::abs(eval_poly(p, g)) > 1e-8 * std::pow(1.0 + std::abs(g), 3)) ++violations;
      }
    }
    CHECK(violations == 0);
  }

  TEST_CASE("QR path agrees with the oracle on larger matrices") {
    std::mt19937_64 rng(7);
    for (std::size_t n : {4u, 5u, 6u, 8u}) {
      for (int trial = 0; trial < 50; ++trial) {
        const Matrix m = random_matrix(rng, n, 10.0);
        const auto ev = eigenvalues(m);
        REQUIRE(ev.size() == n);
        CHECK(match_distance(ev, eigen_oracle(m)) <= 1e-8 * std::max(1.0, max_modulus(ev)));
      }
    }
  }

  TEST_CASE("closed form and QR agree for small matrices") {
    std::mt19937_64 rng(11);
    for (std::size_t n : {1u, 2u, 3u}) {
      for (int trial = 0; trial < 100; ++trial) {
        const Matrix m = random_matrix(rng, n, 5.0);
        const auto a = eigenvalues_closed_form(m);
        const auto b = eigenvalues_qr(m);
        CHECK(match_distance(a, b) <= 1e-8 * std::max(1.0, max_modulus(a)));
      }
    }
  }

  TEST_CASE("lle trace ordering") {
    LleTrace tr;
    tr.push(local_eigenvalues(Matrix{{1.0, 0.0}, {0.0, -2.0}}, 0.0));
    tr.push(local_eigenvalues(Matrix{{-1.0, 0.0}, {0.0, -2.0}}, 1.0));
    CHECK(tr.gamma_max == std::vector<double>{1.0, -1.0});
    CHECK(tr.gamma_min == std::vector<double>{-2.0, -2.0});
    CHECK(tr.chaotic_fraction() == 0.5);
  }

  TEST_CASE("curvature formula") {
    CHECK(curvature(0.0, 2.0) == 2.0);
    CHECK(curvature(1.0, 1.0) == doctest::Approx(1.0 / std::pow(2.0, 1.5)));
    CHECK(curvature(1.0, 1.0) == doctest::Approx(0.3536).epsilon(1e-4));
    CHECK(curvature(5.0, 0.0) == 0.0);
    CHECK(curvature(3.0, -2.0) >= 0.0);
  }

  TEST_CASE("curvature along straight-line exact solution is zero") {
    const auto spec = stiff_linear(300.0);
    const Trajectory tr = sample(*spec.exact, 0.0, 1.0, 200);
    for (const auto& c : curvature_along(tr, spec.problem, 0)) CHECK(c.kappa <= 1e-9);
  }

  TEST_CASE("curvature of sine at its peak") {
    OdeProblem p;
    p.name = "sine";
    p.dim = 1;
    p.rhs = [](double t, const State&) { return State{std::cos(t)}; };
    p.u0 = {0.0};
    p.t_end = std::numbers::pi;
    const Trajectory tr = sample([](double t) { return State{std::sin(t)}; }, 0.0, p.t_end, 2000);
    const std::size_t mid = tr.nearest_index(std::numbers::pi / 2.0);

    SUBCASE("finite differences") {
      const auto k = curvature_along(tr, p, 0);
      CHECK(k[mid].kappa == doctest::Approx(1.0).epsilon(1e-3));
    }
    SUBCASE("chain rule") {
      p.jacobian = [](double, const State&) { return Matrix{{0.0}}; };
      p.dfdt = [](double t, const State&) { return State{-std::sin(t)}; };
      const auto k = curvature_along(tr, p, 0);
      CHECK(k[mid].kappa == doctest::Approx(1.0).epsilon(1e-3));
    }
  }

  TEST_CASE("curvature along non-uniform samples") {
    OdeProblem p;
    p.name = "parabola";
    p.dim = 1;
    p.rhs = [](double t, const State&) { return State{2.0 * t}; };
    p.u0 = {0.0};
    Trajectory tr;
    for (double t : {0.0, 0.1, 0.15, 0.4, 0.45, 0.8, 1.0}) {
      tr.times.push_back(t);
      tr.states.push_back({t * t});
    }
    const auto k = curvature_along(tr, p, 0);
    for (const auto& c : k) {
      CHECK(c.kappa == doctest::Approx(2.0 / std::pow(1.0 + 4.0 * c.t * c.t, 1.5)).epsilon(1e-9));
    }
    tr.times.resize(4);
    tr.states.resize(4);
    CHECK_THROWS_AS((void)curvature_along(tr, p, 0), InsufficientSamples);
  }

  TEST_CASE("dt_max examples and monotonicity") {
    CHECK(std::abs(dt_max(1.0, 1e-3) - 0.08944) <= 1e-5);
    CHECK(std::abs(dt_max(90.0, 1e-3) - 0.00943) <= 1e-5);
    CHECK(std::isinf(dt_max(0.0, 1e-3)));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> lk(-6.0, 6.0);
    for (int i = 0; i < 1000; ++i) {
      const double k = std::pow(10.0, lk(rng));
      const double e = std::pow(10.0, lk(rng) / 2.0);
      CHECK(dt_max(k, e * 1.5) > dt_max(k, e));
      CHECK(dt_max(k * 1.5, e) < dt_max(k, e));
    }
  }

  TEST_CASE("kappa_stiff examples") {
    CHECK(kappa_stiff(-300.0, 1e-3, 0.0) == doctest::Approx(79.1).epsilon(0.5 / 79.1));
    const double tm = t_star_max(-3.0, 0.5);
    CHECK(tm == doctest::Approx(std::log(4.5) / 6.0).epsilon(1e-12));
    CHECK(tm == doctest::Approx(0.2507).epsilon(1e-3));
    CHECK(std::abs(kappa_stiff(-3.0, 0.5, tm) - 2.0 * std::sqrt(3.0) / 9.0 * 3.0) <= 1e-9);
    CHECK(kappa_stiff(-1.0, 1e-9, 0.0) == doctest::Approx(1e-9).epsilon(1e-6));
    CHECK(t_star_max(-300.0, 1e-3) < 0.0);
    CHECK(kappa_stiff_sup(-300.0, 1e-3, 0.0) == kappa_stiff(-300.0, 1e-3, 0.0));
    CHECK(kappa_stiff_sup(-3.0, 0.5, 0.0) == kappa_stiff(-3.0, 0.5, tm));
    CHECK(kappa_stiff_sup(-3.0, 0.5, 1.0) == kappa_stiff(-3.0, 0.5, 1.0));
  }

  TEST_CASE("kappa_stiff_sup bounds the curvature ahead") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const double g = -std::pow(10.0, 4.0 * u(rng) - 1.0);
      const double e = std::pow(10.0, 4.0 * u(rng) - 4.0);
      const double ts = 2.0 * u(rng) / std::abs(g);
      const double sup = kappa_stiff_sup(g, e, ts);
      for (double f : {1.0, 1.1, 1.5, 3.0}) CHECK(kappa_stiff(g, e, ts * f) <= sup * (1.0 + 1e-12));
    }
  }

  TEST_CASE("dt_stiff examples, monotonicity and branch continuity") {
    CHECK(dt_stiff(-2000.0, 0.1) == doctest::Approx(6.0 * std::sqrt(0.1 / (std::sqrt(3.0) * 2000.0))));
    CHECK(dt_stiff(-2000.0, 0.1) == doctest::Approx(0.03224).epsilon(1e-3));
    CHECK_THROWS_AS((void)dt_stiff(0.0, 1e-3), NonNegativeGamma);
    CHECK_THROWS_AS((void)dt_stiff(1.0, 1e-3), NonNegativeGamma);

    // below the regime boundary dt_stiff decreases with |gamma|
    for (double g = 1.0; g < 700.0; g *= 1.3) CHECK(dt_stiff(-g * 1.1, 1e-3) < dt_stiff(-g, 1e-3));

    for (double eps : {1e-3, 1e-2, 0.1, 1.0}) {
      const double g_b = 1.0 / (eps * std::sqrt(2.0));
      const double above = dt_stiff(-g_b * (1.0 + 1e-9), eps);
      const double below = dt_stiff(-g_b * (1.0 - 1e-9), eps);
      CHECK(std::abs(above - below) / below <= 0.25);
    }
  }

  TEST_CASE("dt_stiff_at follows the sup curvature") {
    CHECK(dt_stiff_at(-300.0, 1e-3, 0.0) == dt_stiff(-300.0, 1e-3));
    CHECK(dt_stiff_at(-300.0, 1e-3, 0.01) > dt_stiff(-300.0, 1e-3));
    CHECK(dt_stiff_at(-300.0, 1e-3, 0.01) ==
          dt_max(kappa_stiff(-300.0, 1e-3, 0.01), 1e-3));
  }

  TEST_CASE("Q and R helpers") {
    CHECK(q_ratio(2.0, 1.0, 10.0) == 2.0);
    CHECK(q_ratio(INFINITY, 0.5, 1.0) == 2.0);
    CHECK(q_ratio(1.0, NAN, 1.0) == 0.0);
    CHECK(r_ratio(-300.0, 2.0) == 150.0);
    CHECK(std::isnan(r_ratio(-300.0, 0.0)));
  }

  TEST_CASE("stiffness report fields recompute bit-exactly") {
    const auto spec = stiff_linear(300.0, 1.05, 0.02);
    const Trajectory tr = sample(*spec.exact, 0.0, 0.02, 400);
    const StiffnessReport rep =
        stiffness_report(tr, spec.problem, spec.variational_jacobian, 1e-3, 0);
    REQUIRE(rep.samples.size() == tr.size());
    CHECK(rep.window == doctest::Approx(0.02));
    for (const auto& s : rep.samples) {
      CHECK(s.Q == q_ratio(s.dt_max, s.dt_stiff, rep.window));
      const double r = r_ratio(s.gamma_min, s.kappa);
      if (std::isnan(r)) {
        CHECK(std::isnan(s.R));
      } else {
        CHECK(s.R == r);
      }
      CHECK(s.kappa >= 0.0);
      CHECK(s.dt_stiff > 0.0);
      CHECK(s.dt_max > 0.0);
      CHECK(s.gamma_min == -300.0);
    }
    CHECK(rep.samples.front().Q > 1.0);
    CHECK(rep.samples.back().Q < 1.0);
  }

  TEST_CASE("no decaying mode means not stiff") {
    OdeProblem p;
    p.name = "growth";
    p.dim = 1;
    p.rhs = [](double, const State& u) { return State{u[0]}; };
    p.jacobian = [](double, const State&) { return Matrix{{1.0}}; };
    p.u0 = {1.0};
    const Trajectory tr = sample([](double t) { return State{std::exp(t)}; }, 0.0, 1.0, 20);
    const StiffnessReport rep = stiffness_report(tr, p, p.jacobian, 1e-3, 0);
    for (const auto& s : rep.samples) {
      CHECK(std::isnan(s.dt_stiff));
      CHECK(s.Q == 0.0);
    }
  }

  TEST_CASE("stiffness report window restriction") {
    const auto spec = stiff_linear(300.0, 1.05, 0.02);
    const Trajectory tr = sample(*spec.exact, 0.0, 0.02, 400);
    const StiffnessReport rep =
        stiffness_report(tr, spec.problem, spec.variational_jacobian, 1e-3, 0, 0.01, 0.015);
    CHECK(rep.samples.front().t >= 0.01);
    CHECK(rep.samples.back().t <= 0.015);
    CHECK(rep.t_origin == rep.samples.front().t);
    CHECK_THROWS_AS((void)stiffness_report(tr, spec.problem, spec.variational_jacobian, 1e-3, 0,
                                           5.0, 6.0),
                    InsufficientSamples);
  }
}
