#include "stiffchaos/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace stiffchaos {

namespace {

double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

void sort_eigenvalues(std::vector<Complex>& v) {
  std::sort(v.begin(), v.end(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
}

Complex eval_derivative(const std::vector<double>& c, Complex x) {
  const std::size_t n = c.size() - 1;
  Complex d = 0.0;
  for (std::size_t i = 0; i < n; ++i) d = d * x + c[i] * static_cast<double>(n - i);
  return d;
}

// One Newton step on p, kept only if it lowers the residual.
Complex polish(const std::vector<double>& c, Complex root) {
  const Complex p = eval_poly(c, root);
  const Complex dp = eval_derivative(c, root);
  if (dp == 0.0 || p == 0.0) return root;
  const Complex next = root - p / dp;
  if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) return root;
  return std::abs(eval_poly(c, next)) < std::abs(p) ? next : root;
}

// Roots of x^2 + b x + c without cancellation.
std::vector<Complex> quadratic_roots(double b, double c) {
  const double half = -0.5 * b;
  const double disc = half * half - c;
  if (disc >= 0.0) {
    const double q = half + sign_of(std::sqrt(disc), half);
    if (q == 0.0) return {0.0, 0.0};
    return {q, c / q};
  }
  const double im = std::sqrt(-disc);
  return {Complex(half, im), Complex(half, -im)};
}

std::vector<Complex> cubic_roots(double c2, double c1, double c0) {
  // lambda = x - c2/3 turns the cubic into x^3 + p x + q.
  const double shift = c2 / 3.0;
  const double p = c1 - c2 * shift;
  const double q = 2.0 * shift * shift * shift - shift * c1 + c0;
  const double disc = 0.25 * q * q + p * p * p / 27.0;

  if (p == 0.0 && q == 0.0) return {-shift, -shift, -shift};
  if (disc > 0.0) {
    const double a = -sign_of(std::cbrt(std::abs(0.5 * q) + std::sqrt(disc)), q);
    const double x = (a == 0.0) ? 0.0 : a - p / (3.0 * a);
    const double r = x - shift;
    // Remaining pair from Vieta: sum = -c2 - r, pairwise sum c1 = r*(sum) + prod.
    const double sum = -c2 - r;
    const double prod = c1 - r * sum;
    auto rest = quadratic_roots(-sum, prod);
    return {r, rest[0], rest[1]};
  }
  const double m = 2.0 * std::sqrt(-p / 3.0);
  const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
  const double theta = std::acos(arg) / 3.0;
  std::vector<Complex> out;
  for (int k = 0; k < 3; ++k) {
    out.emplace_back(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - shift, 0.0);
  }
  return out;
}

void balance(Matrix& a) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  const std::size_t n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0;
      double c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity
// transformations.
void hessenberg(Matrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t m = 1; m + 1 < n; ++m) {
    double x = 0.0;
    std::size_t piv = m;
    for (std::size_t j = m; j < n; ++j) {
      if (std::abs(a(j, m - 1)) > std::abs(x)) {
        x = a(j, m - 1);
        piv = j;
      }
    }
    if (piv != m) {
      for (std::size_t j = m - 1; j < n; ++j) std::swap(a(piv, j), a(m, j));
      for (std::size_t j = 0; j < n; ++j) std::swap(a(j, piv), a(j, m));
    }
    if (x == 0.0) continue;
    for (std::size_t i = m + 1; i < n; ++i) {
      double y = a(i, m - 1);
      if (y == 0.0) continue;
      y /= x;
      a(i, m - 1) = y;
      for (std::size_t j = m; j < n; ++j) a(i, j) -= y * a(m, j);
      for (std::size_t j = 0; j < n; ++j) a(j, m) += y * a(j, i);
    }
  }
  for (std::size_t i = 2; i < n; ++i) {
    for (std::size_t j = 0; j + 1 < i; ++j) a(i, j) = 0.0;
  }
}

// Francis double-shift QR on an upper Hessenberg matrix, with exceptional
// shifts after 10 and 20 stalled iterations.
std::vector<Complex> hessenberg_qr(Matrix& h) {
  const int n = static_cast<int>(h.rows());
  auto a = [&h](int i, int j) -> double& {
    return h(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  };
  std::vector<Complex> w(static_cast<std::size_t>(n));
  auto set = [&w](int i, Complex v) { w[static_cast<std::size_t>(i)] = v; };
  constexpr double eps = std::numeric_limits<double>::epsilon();

  double anorm = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
  }
  int nn = n - 1;
  double t = 0.0;
  double p = 0.0, q = 0.0, r = 0.0, s = 0.0, x = 0.0, y = 0.0, z = 0.0, ww = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l > 0; --l) {
        s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= eps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      x = a(nn, nn);
      if (l == nn) {
        set(nn--, x + t);
      } else {
        y = a(nn - 1, nn - 1);
        ww = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + ww;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            set(nn - 1, x + z);
            set(nn, z != 0.0 ? x - ww / z : x + z);
          } else {
            set(nn, Complex(x + p, -z));
            set(nn - 1, Complex(x + p, z));
          }
          nn -= 2;
        } else {
          if (its == 60) throw std::runtime_error("eigenvalues: QR iteration did not converge");
          if (its == 10 || its == 20) {
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            ww = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - ww) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v =
                std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m; i < nn - 1; ++i) {
            a(i + 2, i) = 0.0;
            if (i != m) a(i + 2, i - 1) = 0.0;
          }
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k + 1 != nn) r = a(k + 2, k - 1);
              if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            if ((s = sign_of(std::sqrt(p * p + q * q + r * r), p)) == 0.0) continue;
            if (k == m) {
              if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
              a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              p = a(k, j) + q * a(k + 1, j);
              if (k + 1 != nn) {
                p += r * a(k + 2, j);
                a(k + 2, j) -= p * z;
              }
              a(k + 1, j) -= p * y;
              a(k, j) -= p * x;
            }
            const int mmin = nn < k + 3 ? nn : k + 3;
            for (int i = l; i <= mmin; ++i) {
              p = x * a(i, k) + y * a(i, k + 1);
              if (k + 1 != nn) {
                p += z * a(i, k + 2);
                a(i, k + 2) -= p * r;
              }
              a(i, k + 1) -= p * q;
              a(i, k) -= p;
            }
          }
        }
      }
    } while (l + 1 < nn);
  }
  return w;
}

}  // namespace

std::vector<double> characteristic_polynomial(const Matrix& a) {
  if (!a.square()) throw std::invalid_argument("characteristic_polynomial: matrix not square");
  const std::size_t n = a.rows();
  std::vector<double> c(n + 1, 0.0);
  c[0] = 1.0;
  // M_k = A*M_{k-1} + c_{k-1} I, c_k = -tr(A*M_k)/k.
  Matrix m(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    Matrix next(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t l = 0; l < n; ++l) s += a(i, l) * m(l, j);
        next(i, j) = s;
      }
      next(i, i) += c[k - 1];
    }
    m = std::move(next);
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < n; ++l) tr += a(i, l) * m(l, i);
    }
    c[k] = -tr / static_cast<double>(k);
  }
  return c;
}

Complex eval_poly(const std::vector<double>& coeffs, Complex x) {
  Complex v = 0.0;
  for (double c : coeffs) v = v * x + c;
  return v;
}

std::vector<Complex> eigenvalues_closed_form(const Matrix& a) {
  if (!a.square()) throw std::invalid_argument("eigenvalues: matrix not square");
  const std::size_t n = a.rows();
  std::vector<double> c;
  std::vector<Complex> roots;
  switch (n) {
    case 0: return {};
    case 1: return {Complex(a(0, 0), 0.0)};
    case 2: {
      const double tr = a(0, 0) + a(1, 1);
      const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
      c = {1.0, -tr, det};
      roots = quadratic_roots(-tr, det);
      break;
    }
    case 3: {
      const double tr = a.trace();
      const double minors = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) + a(0, 0) * a(2, 2) -
                            a(0, 2) * a(2, 0) + a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
      const double det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
                         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
      c = {1.0, -tr, minors, -det};
      roots = cubic_roots(-tr, minors, -det);
      break;
    }
    default: throw std::invalid_argument("eigenvalues_closed_form: dim must be <= 3");
  }
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (roots[i].imag() == 0.0) {
      const Complex polished = polish(c, roots[i]);
      roots[i] = Complex(polished.real(), 0.0);
    } else if (roots[i].imag() > 0.0) {
      roots[i] = polish(c, roots[i]);
    }
  }
  // Restore exact conjugate symmetry after polishing the upper member.
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (roots[i].imag() >= 0.0) continue;
    for (std::size_t j = 0; j < roots.size(); ++j) {
      if (j != i && roots[j].imag() > 0.0) {
        roots[i] = std::conj(roots[j]);
        break;
      }
    }
  }
  sort_eigenvalues(roots);
  return roots;
}

std::vector<Complex> eigenvalues_qr(const Matrix& a) {
  if (!a.square()) throw std::invalid_argument("eigenvalues: matrix not square");
  if (!all_finite(a.data())) throw std::invalid_argument("eigenvalues: matrix not finite");
  Matrix h = a;
  balance(h);
  hessenberg(h);
  auto w = hessenberg_qr(h);
  sort_eigenvalues(w);
  return w;
}

std::vector<Complex> eigenvalues(const Matrix& a) {
  if (a.rows() <= 3) return eigenvalues_closed_form(a);
  return eigenvalues_qr(a);
}

}  // namespace stiffchaos
