#ifndef MLSWE_KINETIC_HPP
#define MLSWE_KINETIC_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mlswe {

/// Partial moments of chi0(z) = (1/pi) sqrt(1 - z^2/4) over [a,b],
/// clipped to the support [-2,2].
struct ChiPartialMoments {
  double m0 = 0.0;  // integral of       chi0
  double m1 = 0.0;  // integral of z   * chi0
  double m2 = 0.0;  // integral of z^2 * chi0
};

namespace detail {

inline double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

// Antiderivative of chi0. With s = z/2: (1/pi)(s sqrt(1-s^2) + asin s).
inline double chi_antideriv0(double z) {
  double s = clamp_unit(0.5 * z);
  return (s * std::sqrt(1.0 - s * s) + std::asin(s)) / M_PI;
}

// Antiderivative of z * chi0: -(4/(3 pi)) (1 - z^2/4)^{3/2}.
inline double chi_antideriv1(double z) {
  double s = clamp_unit(0.5 * z);
  double r = 1.0 - s * s;
  return -4.0 / (3.0 * M_PI) * r * std::sqrt(r);
}

// Antiderivative of z^2 * chi0: (1/pi)(theta - sin(4 theta)/4), theta = asin(z/2).
inline double chi_antideriv2(double z) {
  double theta = std::asin(clamp_unit(0.5 * z));
  return (theta - 0.25 * std::sin(4.0 * theta)) / M_PI;
}

}  // namespace detail

inline ChiPartialMoments chi_partial_moments(double a, double b) {
  if (a > b) throw std::invalid_argument("chi_partial_moments: a > b");
  double lo = std::max(a, -2.0);
  double hi = std::min(b, 2.0);
  if (lo >= hi) return {};
  ChiPartialMoments m;
  m.m0 = detail::chi_antideriv0(hi) - detail::chi_antideriv0(lo);
  m.m1 = detail::chi_antideriv1(hi) - detail::chi_antideriv1(lo);
  m.m2 = detail::chi_antideriv2(hi) - detail::chi_antideriv2(lo);
  return m;
}

/// Gibbs equilibrium M(h, u, xi) = (l_alpha/(g pi)) sqrt((2gh - (xi-u)^2)_+).
inline double maxwellian_density(double h, double u, double l_alpha, double g,
                                 double xi) {
  if (h <= 0.0) return 0.0;
  double s = 2.0 * g * h - (xi - u) * (xi - u);
  if (s <= 0.0) return 0.0;
  return l_alpha / (g * M_PI) * std::sqrt(s);
}

/// Half-line flux integrals of the Maxwellian:
///   f_h_pm = \int_{xi >< 0} xi   M dxi,   f_q_pm = \int_{xi >< 0} xi^2 M dxi.
struct HalfFluxes {
  double f_h_plus = 0.0;
  double f_h_minus = 0.0;
  double f_q_plus = 0.0;
  double f_q_minus = 0.0;
};

inline HalfFluxes half_fluxes(double h, double u, double l_alpha, double g) {
  HalfFluxes f;
  // Dry guard: avoid the -u/c division for vanishing depth.
  if (2.0 * g * h < 64.0 * std::numeric_limits<double>::min()) return f;
  double c = std::sqrt(0.5 * g * h);
  double hl = l_alpha * h;
  // xi = 0 in the scaled variable z = (xi - u)/c, clamped to the support so
  // supersonic states put the whole Maxwellian on one side.
  double zc = std::clamp(-u / c, -2.0, 2.0);
  ChiPartialMoments plus = chi_partial_moments(zc, 2.0);
  ChiPartialMoments minus = chi_partial_moments(-2.0, zc);
  f.f_h_plus = hl * (u * plus.m0 + c * plus.m1);
  f.f_h_minus = hl * (u * minus.m0 + c * minus.m1);
  f.f_q_plus = hl * (u * u * plus.m0 + 2.0 * u * c * plus.m1 + c * c * plus.m2);
  f.f_q_minus =
      hl * (u * u * minus.m0 + 2.0 * u * c * minus.m1 + c * c * minus.m2);
  // The integrands are signed by construction; keep rounding from flipping
  // the sign near the sonic points.
  f.f_h_plus = std::max(f.f_h_plus, 0.0);
  f.f_h_minus = std::min(f.f_h_minus, 0.0);
  f.f_q_plus = std::max(f.f_q_plus, 0.0);
  f.f_q_minus = std::max(f.f_q_minus, 0.0);
  return f;
}

}  // namespace mlswe

#endif  // MLSWE_KINETIC_HPP
