#ifndef TESTS_ORACLES_HPP
#define TESTS_ORACLES_HPP

// Slow reference computations used only to check the closed forms in the
// library: adaptive quadrature and a dense linear solve.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

namespace detail {

inline double simpson(const std::function<double(double)>& f, double a,
                      double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive(const std::function<double(double)>& f, double a,
                       double b, double fa, double fm, double fb, double whole,
                       double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(f, a, m, fa, flm, fm);
  double right = simpson(f, m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature; tol is an absolute target.
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12) {
  if (a >= b) return 0.0;
  // Split at a few interior points so square-root kinks are localized.
  const int pieces = 8;
  double total = 0.0;
  for (int p = 0; p < pieces; ++p) {
    double x0 = a + (b - a) * p / pieces;
    double x1 = a + (b - a) * (p + 1) / pieces;
    double m = 0.5 * (x0 + x1);
    double f0 = f(x0), fm = f(m), f1 = f(x1);
    total += detail::adaptive(f, x0, x1, f0, fm, f1,
                              detail::simpson(f, x0, x1, f0, fm, f1),
                              tol / pieces, 48);
  }
  return total;
}

/// Dense Gaussian elimination with partial pivoting, for tiny systems.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> A,
                                       std::vector<double> b) {
  std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    std::swap(A[c], A[piv]);
    std::swap(b[c], b[piv]);
    if (A[c][c] == 0.0) throw std::runtime_error("dense_solve: singular");
    for (std::size_t r = c + 1; r < n; ++r) {
      double m = A[r][c] / A[c][c];
      for (std::size_t k = c; k < n; ++k) A[r][k] -= m * A[c][k];
      b[r] -= m * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= A[r][k] * x[k];
    x[r] = s / A[r][r];
  }
  return x;
}

}  // namespace oracle

#endif  // TESTS_ORACLES_HPP
