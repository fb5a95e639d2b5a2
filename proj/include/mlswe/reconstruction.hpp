#ifndef MLSWE_RECONSTRUCTION_HPP
#define MLSWE_RECONSTRUCTION_HPP

#include <algorithm>
#include <vector>

#include "mlswe/core.hpp"
#include "mlswe/kinetic.hpp"

namespace mlswe {

/// Hydrostatically reconstructed interface depths:
///   z* = max(z_L, z_R),  h_L* = (h_L + z_L - z*)_+,  h_R* = (h_R + z_R - z*)_+.
struct InterfaceStates {
  double h_left_star = 0.0;
  double h_right_star = 0.0;
  double z_star = 0.0;
};

inline InterfaceStates reconstruct(double h_left, double h_right, double z_left,
                                   double z_right) {
  InterfaceStates s;
  s.z_star = std::max(z_left, z_right);
  s.h_left_star = std::max(h_left + z_left - s.z_star, 0.0);
  s.h_right_star = std::max(h_right + z_right - s.z_star, 0.0);
  return s;
}

/// Per-layer numerical fluxes at one interface. The mass flux is shared by
/// both neighbors; the momentum fluxes differ by the hydrostatic pressure
/// corrections and coincide on locally flat topography.
struct InterfaceFluxes {
  std::vector<double> f_h;        // per layer
  std::vector<double> f_q_left;   // used by the left cell at its right edge
  std::vector<double> f_q_right;  // used by the right cell at its left edge
};

/// Kinetic HR fluxes. The reconstructed states keep the donor-cell
/// velocities; the momentum correction is the xi-moment of the source
/// density (xi - u)(M - M*), which evaluates to g l_alpha (h^2 - h*^2)/2.
inline InterfaceFluxes interface_fluxes(double h_left, double h_right,
                                        const std::vector<double>& u_left,
                                        const std::vector<double>& u_right,
                                        const InterfaceStates& states,
                                        const LayerPartition& layers, double g) {
  std::size_t n = layers.count();
  InterfaceFluxes out;
  out.f_h.resize(n);
  out.f_q_left.resize(n);
  out.f_q_right.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    double l = layers.fraction(a);
    HalfFluxes fl = half_fluxes(states.h_left_star, u_left[a], l, g);
    HalfFluxes fr = half_fluxes(states.h_right_star, u_right[a], l, g);
    out.f_h[a] = fl.f_h_plus + fr.f_h_minus;
    double f_q_kin = fl.f_q_plus + fr.f_q_minus;
    out.f_q_left[a] =
        f_q_kin + 0.5 * g * l *
                      (h_left * h_left - states.h_left_star * states.h_left_star);
    out.f_q_right[a] =
        f_q_kin + 0.5 * g * l * (h_right * h_right -
                                 states.h_right_star * states.h_right_star);
  }
  return out;
}

}  // namespace mlswe

#endif  // MLSWE_RECONSTRUCTION_HPP
