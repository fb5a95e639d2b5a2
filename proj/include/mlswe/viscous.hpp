#ifndef MLSWE_VISCOUS_HPP
#define MLSWE_VISCOUS_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mlswe/core.hpp"
#include "mlswe/euler_step.hpp"

namespace mlswe {

enum class ViscousMode { as_written, vertical_implicit };

struct ViscousConfig {
  ViscousMode mode = ViscousMode::as_written;
  double parabolic_safety = 0.9;
};

/// Bottom wall-law coefficient kappa = k_l + k_t h |u_b|.
inline double friction_coefficient(double u_bottom, double h,
                                   const PhysicalParams& params) {
  return params.k_l + params.k_t * h * std::abs(u_bottom);
}

/// Explicit-diffusion stability bound for the as_written mode; +inf when
/// mu = 0 or the domain is dry.
inline double parabolic_dt_bound(const FlowState& state, const Grid1D& grid,
                                 const LayerPartition& layers,
                                 const PhysicalParams& params,
                                 const ViscousConfig& cfg) {
  if (params.mu <= 0.0) return std::numeric_limits<double>::infinity();
  double bound = std::numeric_limits<double>::infinity();
  std::size_t n = state.cell_count(), nl = layers.count();
  for (std::size_t i = 0; i < n; ++i) {
    double dx = grid.width(i);
    bound = std::min(bound, dx * dx / (8.0 * params.mu));
    double h = state.h(i);
    if (h <= params.dry_tol) continue;
    for (std::size_t a = 0; a + 1 < nl; ++a) {
      double pair = (layers.fraction(a) + layers.fraction(a + 1)) * h;
      bound = std::min(bound,
                       pair * layers.fraction(a) * h / (4.0 * params.mu));
    }
  }
  return cfg.parabolic_safety * bound;
}

/// Viscosity and bottom-friction source step applied after the hyperbolic
/// step. Depths are untouched; only the layer momenta change. The midpoint
/// velocity u^{1/2} = (u^n + u~^{n+1})/2 uses the pre-step and post-Euler
/// states; in vertical_implicit mode the vertical exchange and friction use
/// the end-of-step velocity instead, giving one tridiagonal solve per column.
inline FlowState viscous_step(const FlowState& state_tilde,
                              const FlowState& state_old, const Grid1D& grid,
                              const LayerPartition& layers,
                              const PhysicalParams& params, double dt,
                              const ViscousConfig& cfg = {}) {
  std::size_t n = state_tilde.cell_count(), nl = layers.count();
  if (state_old.cell_count() != n || state_old.layer_count() != nl)
    throw std::invalid_argument("viscous_step: state shape mismatch");
  if (cfg.mode == ViscousMode::as_written) {
    double bound = parabolic_dt_bound(state_tilde, grid, layers, params, cfg);
    if (dt > bound)
      throw std::runtime_error("viscous_step: dt exceeds the parabolic bound");
  }

  std::vector<double> u_half(nl * n);
  std::vector<double> u_old(nl * n);
  for (std::size_t a = 0; a < nl; ++a)
    for (std::size_t i = 0; i < n; ++i) {
      u_old[a * n + i] = velocity(state_old, layers, params, a, i);
      u_half[a * n + i] =
          0.5 * (u_old[a * n + i] + velocity(state_tilde, layers, params, a, i));
    }

  bool periodic = grid.boundary() == Boundary::periodic;
  auto wrap = [&](long i) -> long {
    if (i >= 0 && i < long(n)) return i;
    if (periodic) return (i + long(n)) % long(n);
    return -1;  // wall: mirror with negated velocity handled by caller
  };

  FlowState next = state_tilde;
  std::vector<double> rhs(nl), sub(nl), diag(nl), sup(nl);

  for (std::size_t i = 0; i < n; ++i) {
    double h = state_tilde.h(i);
    if (h <= params.dry_tol) continue;
    double dx = grid.width(i);
    long ip = wrap(long(i) + 1), im = wrap(long(i) - 1);

    for (std::size_t a = 0; a < nl; ++a) {
      double ha = layers.fraction(a) * h;
      double u_c = u_half[a * n + i];
      // Neighbor midpoint velocities; walls mirror with a sign flip.
      double u_r = ip >= 0 ? u_half[a * n + std::size_t(ip)] : -u_c;
      double u_l = im >= 0 ? u_half[a * n + std::size_t(im)] : -u_c;
      double h_r = ip >= 0 ? layers.fraction(a) * state_tilde.h(ip) : ha;
      double h_l = im >= 0 ? layers.fraction(a) * state_tilde.h(im) : ha;
      double dx_r = ip >= 0 ? grid.width(ip) : dx;
      double dx_l = im >= 0 ? grid.width(im) : dx;

      double horizontal =
          8.0 * params.mu / dx *
          (0.5 * (ha + h_r) * (u_r - u_c) / (dx_r + dx) -
           0.5 * (h_l + ha) * (u_c - u_l) / (dx + dx_l));
      rhs[a] = state_tilde.q(a, i) + dt * horizontal;
    }

    double u_b_old = u_old[0 * n + i];
    double kappa = friction_coefficient(u_b_old, h, params);

    if (cfg.mode == ViscousMode::as_written) {
      for (std::size_t a = 0; a < nl; ++a) {
        double vertical = 0.0;
        if (a + 1 < nl) {
          double pair = (layers.fraction(a + 1) + layers.fraction(a)) * h;
          vertical +=
              2.0 * params.mu * (u_half[(a + 1) * n + i] - u_half[a * n + i]) /
              pair;
        }
        if (a > 0) {
          double pair = (layers.fraction(a) + layers.fraction(a - 1)) * h;
          vertical -=
              2.0 * params.mu * (u_half[a * n + i] - u_half[(a - 1) * n + i]) /
              pair;
        }
        double friction = a == 0 ? kappa * u_half[0 * n + i] : 0.0;
        next.q(a, i) = rhs[a] + dt * (vertical - friction);
      }
    } else {
      // Vertical and friction terms at (u^n + u^{n+1})/2 with the unknown
      // end-of-step velocity: tridiagonal system in the layer momenta.
      for (std::size_t a = 0; a < nl; ++a) {
        double ha = layers.fraction(a) * h;
        sub[a] = 0.0;
        sup[a] = 0.0;
        diag[a] = 1.0;
        double explicit_vert = 0.0;
        if (a + 1 < nl) {
          double pair = (layers.fraction(a + 1) + layers.fraction(a)) * h;
          double c = 2.0 * params.mu / pair;
          double hp = layers.fraction(a + 1) * h;
          diag[a] += 0.5 * dt * c / ha;
          sup[a] -= 0.5 * dt * c / hp;
          explicit_vert += c * (u_old[(a + 1) * n + i] - u_old[a * n + i]);
        }
        if (a > 0) {
          double pair = (layers.fraction(a) + layers.fraction(a - 1)) * h;
          double c = 2.0 * params.mu / pair;
          double hm = layers.fraction(a - 1) * h;
          diag[a] += 0.5 * dt * c / ha;
          sub[a] -= 0.5 * dt * c / hm;
          explicit_vert -= c * (u_old[a * n + i] - u_old[(a - 1) * n + i]);
        }
        double explicit_fric = 0.0;
        if (a == 0) {
          diag[a] += 0.5 * dt * kappa / ha;
          explicit_fric = kappa * u_old[0 * n + i];
        }
        rhs[a] += dt * (0.5 * explicit_vert - 0.5 * explicit_fric);
      }
      detail::solve_tridiagonal(sub, diag, sup, rhs);
      for (std::size_t a = 0; a < nl; ++a) next.q(a, i) = rhs[a];
    }
  }
  return next;
}

}  // namespace mlswe

#endif  // MLSWE_VISCOUS_HPP
