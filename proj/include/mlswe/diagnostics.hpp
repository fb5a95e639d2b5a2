#ifndef MLSWE_DIAGNOSTICS_HPP
#define MLSWE_DIAGNOSTICS_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mlswe/core.hpp"
#include "mlswe/euler_step.hpp"

namespace mlswe {

/// Layer mechanical energy density
///   E_alpha = h_alpha u_alpha^2 / 2 + g h_alpha h / 2 + g z_b h_alpha.
inline double layer_energy(const FlowState& state, const Topography& topo,
                           const LayerPartition& layers,
                           const PhysicalParams& params, std::size_t alpha,
                           std::size_t i) {
  double h = state.h(i);
  double ha = layer_depth(state, layers, alpha, i);
  double u = velocity(state, layers, params, alpha, i);
  return 0.5 * ha * u * u + 0.5 * params.g * ha * h + params.g * topo[i] * ha;
}

inline double total_mass(const FlowState& state, const Grid1D& grid) {
  double m = 0.0;
  for (std::size_t i = 0; i < state.cell_count(); ++i)
    m += grid.width(i) * state.h(i);
  return m;
}

inline double total_momentum(const FlowState& state, const Grid1D& grid) {
  double p = 0.0;
  for (std::size_t a = 0; a < state.layer_count(); ++a)
    for (std::size_t i = 0; i < state.cell_count(); ++i)
      p += grid.width(i) * state.q(a, i);
  return p;
}

inline double total_energy(const FlowState& state, const Grid1D& grid,
                           const Topography& topo, const LayerPartition& layers,
                           const PhysicalParams& params) {
  double e = 0.0;
  for (std::size_t a = 0; a < layers.count(); ++a)
    for (std::size_t i = 0; i < state.cell_count(); ++i)
      e += grid.width(i) * layer_energy(state, topo, layers, params, a, i);
  return e;
}

/// Per-step conservation and energy record. topo_error_bound is the
/// computable right-hand side of the discrete energy inequality,
///   C sum_i dx_i sigma_i^2 v_m^2 g [(h_i - h_{i+1/2-})^2 + (h_i - h_{i-1/2+})^2],
/// which vanishes identically on flat topography.
struct EnergyBudget {
  double time = 0.0;
  double total_mass = 0.0;
  double total_momentum = 0.0;
  double total_energy = 0.0;
  double step_energy_delta = 0.0;
  double topo_error_bound = 0.0;
};

inline double max_wave_speed(const FlowState& state,
                             const LayerPartition& layers,
                             const PhysicalParams& params) {
  double vm = 0.0;
  for (std::size_t i = 0; i < state.cell_count(); ++i) {
    double h = state.h(i);
    if (h <= params.dry_tol) continue;
    double c2 = 2.0 * std::sqrt(2.0 * params.g * h);
    for (std::size_t a = 0; a < layers.count(); ++a)
      vm = std::max(vm, std::abs(velocity(state, layers, params, a, i)) + c2);
  }
  return vm;
}

/// Budget of one accepted step: totals of the new state, the energy change,
/// and the topography error bound built from the step's reconstructed depths.
inline EnergyBudget energy_budget(const FlowState& prev,
                                  const EulerStepResult& step,
                                  const Grid1D& grid, const Topography& topo,
                                  const LayerPartition& layers,
                                  const PhysicalParams& params,
                                  double error_constant = 1.0) {
  std::size_t n = prev.cell_count();
  if (step.state.cell_count() != n || topo.size() != n ||
      grid.cell_count() != n)
    throw std::invalid_argument("energy_budget: mismatched grids");

  EnergyBudget b;
  b.time = step.state.time();
  b.total_mass = total_mass(step.state, grid);
  b.total_momentum = total_momentum(step.state, grid);
  b.total_energy = total_energy(step.state, grid, topo, layers, params);
  b.step_energy_delta =
      b.total_energy - total_energy(prev, grid, topo, layers, params);

  double vm = max_wave_speed(prev, layers, params);
  double bound = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double sigma = step.dt / grid.width(i);
    // h_{i+1/2-} lives on edge i+1, h_{i-1/2+} on edge i.
    double d_plus = prev.h(i) - step.h_left_star[i + 1];
    double d_minus = prev.h(i) - step.h_right_star[i];
    bound += grid.width(i) * sigma * sigma * vm * vm * params.g *
             (d_plus * d_plus + d_minus * d_minus);
  }
  b.topo_error_bound = error_constant * bound;
  return b;
}

/// Sup-norm of one Euler step applied to the state; zero (to rounding) on
/// equilibria such as the lake at rest.
inline double well_balance_residual(const FlowState& state, const Grid1D& grid,
                                    const Topography& topo,
                                    const LayerPartition& layers,
                                    const PhysicalParams& params) {
  EulerStepResult step = euler_step(state, grid, topo, layers, params);
  double r = 0.0;
  for (std::size_t i = 0; i < state.cell_count(); ++i) {
    r = std::max(r, std::abs(step.state.h(i) - state.h(i)));
    for (std::size_t a = 0; a < state.layer_count(); ++a)
      r = std::max(r, std::abs(step.state.q(a, i) - state.q(a, i)));
  }
  return r;
}

/// Interface elevation z_{alpha+1/2} = z_b + sum_{j<=alpha} l_j h.
inline double interface_elevation(const FlowState& state,
                                  const Topography& topo,
                                  const LayerPartition& layers,
                                  std::size_t alpha_half, std::size_t i) {
  double z = topo[i];
  for (std::size_t j = 0; j < alpha_half; ++j)
    z += layers.fraction(j) * state.h(i);
  return z;
}

/// Layer vertical velocities recovered from the discrete divergence
/// identity: the time change and horizontal transport of the layer's
/// squared-elevation difference balance h_alpha w_alpha plus the elevation-
/// weighted exchange rates. Dry columns get w = 0.
inline std::vector<double> vertical_velocity(
    const FlowState& state, const FlowState& prev_state, const Grid1D& grid,
    const Topography& topo, const LayerPartition& layers,
    const PhysicalParams& params, double dt, const ExchangeField& exchange) {
  std::size_t n = state.cell_count(), nl = layers.count();
  std::vector<double> w(nl * n, 0.0);
  bool periodic = grid.boundary() == Boundary::periodic;

  auto zeta = [&](const FlowState& s, std::size_t a, std::size_t i) {
    double zu = interface_elevation(s, topo, layers, a + 1, i);
    double zl = interface_elevation(s, topo, layers, a, i);
    return 0.5 * (zu * zu - zl * zl);
  };

  for (std::size_t i = 0; i < n; ++i) {
    double h = state.h(i);
    if (h <= params.dry_tol) continue;
    for (std::size_t a = 0; a < nl; ++a) {
      double ha = layers.fraction(a) * h;
      double ddt = (zeta(state, a, i) - zeta(prev_state, a, i)) / dt;

      // Centered x-derivative of zeta * u_alpha with mirror/wrap ghosts.
      double zp, zm, xp, xm;
      if (i + 1 < n || periodic) {
        std::size_t ip = (i + 1) % n;
        zp = zeta(state, a, ip) * velocity(state, layers, params, a, ip);
        xp = i + 1 < n ? grid.center(i + 1)
                       : grid.center(i) + 0.5 * (grid.width(i) + grid.width(ip));
      } else {  // wall: mirrored cell with negated velocity
        zp = -zeta(state, a, i) * velocity(state, layers, params, a, i);
        xp = grid.center(i) + grid.width(i);
      }
      if (i > 0 || periodic) {
        std::size_t im = (i + n - 1) % n;
        zm = zeta(state, a, im) * velocity(state, layers, params, a, im);
        xm = i > 0 ? grid.center(i - 1)
                   : grid.center(i) - 0.5 * (grid.width(i) + grid.width(im));
      } else {
        zm = -zeta(state, a, i) * velocity(state, layers, params, a, i);
        xm = grid.center(i) - grid.width(i);
      }
      double ddx = (zp - zm) / (xp - xm);

      double g_up = exchange.at_or_zero(int(a), i);
      double g_dn = exchange.at_or_zero(int(a) - 1, i);
      double z_up = interface_elevation(state, topo, layers, a + 1, i);
      double z_dn = interface_elevation(state, topo, layers, a, i);

      w[a * n + i] = (ddt + ddx - z_up * g_up + z_dn * g_dn) / ha;
    }
  }
  return w;
}

}  // namespace mlswe

#endif  // MLSWE_DIAGNOSTICS_HPP
