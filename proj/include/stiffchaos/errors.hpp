#pragma once

#include <stdexcept>
#include <string>

namespace stiffchaos {

/// Base class for numerical failures (blow-up, divergence, unconverged oracle).
/// The CLI maps these to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state component became NaN or infinite during integration.
class NonFiniteState : public NumericalError {
 public:
  NonFiniteState(double t, const std::string& where)
      : NumericalError(where + ": non-finite state at t=" + std::to_string(t)), t_(t) {}
  [[nodiscard]] double time() const noexcept { return t_; }

 private:
  double t_;
};

class NewtonDivergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OracleNotConverged : public NumericalError {
 public:
  OracleNotConverged(double change, double threshold)
      : NumericalError("reference solution not converged: refinement doubling changed the state by " +
                       std::to_string(change) + " (threshold " + std::to_string(threshold) + ")"),
        change_(change) {}
  [[nodiscard]] double change() const noexcept { return change_; }

 private:
  double change_;
};

/// An exponential factor of the transformed system would overflow; the
/// interval is too long for the chosen mu.
class ExponentOverflow : public NumericalError {
 public:
  explicit ExponentOverflow(double argument)
      : NumericalError("exponent argument " + std::to_string(argument) + " exceeds 700"),
        argument_(argument) {}
  [[nodiscard]] double argument() const noexcept { return argument_; }

 private:
  double argument_;
};

/// dt_stiff is only defined for a negative exponent.
class NonNegativeGamma : public std::domain_error {
 public:
  explicit NonNegativeGamma(double gamma)
      : std::domain_error("stiffness bound needs gamma < 0, got " + std::to_string(gamma)) {}
};

class InsufficientSamples : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace stiffchaos
