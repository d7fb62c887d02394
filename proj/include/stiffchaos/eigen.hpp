#pragma once

#include <complex>
#include <vector>

#include "stiffchaos/linalg.hpp"

namespace stiffchaos {

using Complex = std::complex<double>;

/// Monic characteristic polynomial det(lambda*I - A), coefficients in
/// descending order: {1, c1, ..., cn}. Computed by Faddeev-LeVerrier.
[[nodiscard]] std::vector<double> characteristic_polynomial(const Matrix& a);

/// Horner evaluation of a real-coefficient polynomial (descending order).
[[nodiscard]] Complex eval_poly(const std::vector<double>& coeffs, Complex x);

/// Eigenvalues of a square matrix. dim <= 3 uses the closed-form roots of the
/// characteristic polynomial followed by one Newton polish; larger matrices
/// go through balancing, Hessenberg reduction and Francis double-shift QR.
/// Complex values come in exact conjugate pairs, sorted by descending real
/// part (ties: positive imaginary part first).
[[nodiscard]] std::vector<Complex> eigenvalues(const Matrix& a);

/// The closed-form path only; requires dim <= 3.
[[nodiscard]] std::vector<Complex> eigenvalues_closed_form(const Matrix& a);

/// The iterative path only; valid for any dim.
[[nodiscard]] std::vector<Complex> eigenvalues_qr(const Matrix& a);

}  // namespace stiffchaos
