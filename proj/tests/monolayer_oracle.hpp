#ifndef TESTS_MONOLAYER_ORACLE_HPP
#define TESTS_MONOLAYER_ORACLE_HPP

// Independent single-layer kinetic shallow-water scheme with hydrostatic
// reconstruction, written directly against the xi-space integrals rather
// than the library's z-substitution. Used to pin the N = 1 reduction.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace monolayer {

// Antiderivatives of sqrt(a^2 - s^2), s*sqrt(...), s^2*sqrt(...) on |s|<=a.
inline double I0(double s, double a) {
  double r = std::max(a * a - s * s, 0.0);
  return 0.5 * s * std::sqrt(r) +
         0.5 * a * a * std::asin(std::clamp(s / a, -1.0, 1.0));
}
inline double I1(double s, double a) {
  double r = std::max(a * a - s * s, 0.0);
  return -std::pow(r, 1.5) / 3.0;
}
inline double I2(double s, double a) {
  double r = std::max(a * a - s * s, 0.0);
  return 0.125 * s * (2.0 * s * s - a * a) * std::sqrt(r) +
         0.125 * a * a * a * a * std::asin(std::clamp(s / a, -1.0, 1.0));
}

// Integrals of xi^k * M over [lo, hi], M = sqrt((2gh - (xi-u)^2)_+)/(g pi).
struct Moments {
  double m0 = 0.0, m1 = 0.0;
};

inline Moments flux_moments(double h, double u, double g, double lo,
                            double hi) {
  Moments out;
  if (h <= 0.0) return out;
  double a = std::sqrt(2.0 * g * h);
  double s0 = std::clamp(lo - u, -a, a), s1 = std::clamp(hi - u, -a, a);
  if (s1 <= s0) return out;
  double j0 = I0(s1, a) - I0(s0, a);
  double j1 = I1(s1, a) - I1(s0, a);
  double j2 = I2(s1, a) - I2(s0, a);
  double scale = 1.0 / (g * M_PI);
  out.m0 = scale * (j1 + u * j0);                      // integral of xi M
  out.m1 = scale * (j2 + 2.0 * u * j1 + u * u * j0);   // integral of xi^2 M
  return out;
}

struct State {
  std::vector<double> h, q;
};

/// One explicit kinetic HR step on a uniform periodic grid.
inline State step(const State& s, const std::vector<double>& zb, double g,
                  double dx, double dt, double dry_tol) {
  std::size_t n = s.h.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> Fh(n + 1), FqL(n + 1), FqR(n + 1);
  for (std::size_t e = 0; e <= n; ++e) {
    std::size_t li = (e + n - 1) % n, ri = e % n;
    double uL = s.h[li] > dry_tol ? s.q[li] / s.h[li] : 0.0;
    double uR = s.h[ri] > dry_tol ? s.q[ri] / s.h[ri] : 0.0;
    double zs = std::max(zb[li], zb[ri]);
    double hL = std::max(s.h[li] + zb[li] - zs, 0.0);
    double hR = std::max(s.h[ri] + zb[ri] - zs, 0.0);
    Moments plus = flux_moments(hL, uL, g, 0.0, inf);
    Moments minus = flux_moments(hR, uR, g, -inf, 0.0);
    Fh[e] = plus.m0 + minus.m0;
    double fq = plus.m1 + minus.m1;
    FqL[e] = fq + 0.5 * g * (s.h[li] * s.h[li] - hL * hL);
    FqR[e] = fq + 0.5 * g * (s.h[ri] * s.h[ri] - hR * hR);
  }
  State out = s;
  for (std::size_t i = 0; i < n; ++i) {
    out.h[i] = s.h[i] - dt / dx * (Fh[i + 1] - Fh[i]);
    out.q[i] = s.q[i] - dt / dx * (FqL[i + 1] - FqR[i]);
    if (out.h[i] <= dry_tol) out.q[i] = 0.0;
  }
  return out;
}

}  // namespace monolayer

#endif  // TESTS_MONOLAYER_ORACLE_HPP
