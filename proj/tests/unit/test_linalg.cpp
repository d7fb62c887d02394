#include <doctest.h>

#include <cmath>

#include "stiffchaos/linalg.hpp"

using namespace stiffchaos;

TEST_SUITE("linalg") {
  TEST_CASE("solve_linear needs pivoting for a zero leading entry") {
    const Matrix a{{0.0, 1.0}, {1.0, 1.0}};
    const State x = solve_linear(a, {2.0, 3.0});
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(2.0));
  }

  TEST_CASE("solve_linear rejects a singular matrix") {
    const Matrix a{{1.0, 2.0}, {2.0, 4.0}};
    CHECK_THROWS((void)solve_linear(a, {1.0, 1.0}));
  }

  TEST_CASE("multiply, trace and helpers") {
    const Matrix a{{1.0, 2.0}, {3.0, 4.0}};
    const State y = multiply(a, State{1.0, -1.0});
    CHECK(y == State{-1.0, -1.0});
    CHECK(a.trace() == 5.0);
    CHECK(Matrix::identity(2) == Matrix{{1.0, 0.0}, {0.0, 1.0}});
    CHECK(max_abs_diff(State{1.0, 2.0}, State{1.5, 1.0}) == 1.0);
    CHECK(all_finite(State{1.0, 2.0}));
    CHECK_FALSE(all_finite(State{1.0, NAN}));
  }
}
