#ifndef MLSWE_EULER_STEP_HPP
#define MLSWE_EULER_STEP_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mlswe/core.hpp"
#include "mlswe/kinetic.hpp"
#include "mlswe/reconstruction.hpp"

namespace mlswe {

struct CflViolation : std::runtime_error {
  explicit CflViolation(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mass-exchange rates G_{alpha+1/2,i} at the N-1 interior layer interfaces.
/// Interface k separates layers k and k+1 (0-based); the boundary interfaces
/// are identically zero and not stored.
class ExchangeField {
public:
  ExchangeField(std::size_t layers, std::size_t cells)
      : layers_(layers), cells_(cells),
        g_(layers > 1 ? (layers - 1) * cells : 0, 0.0) {}

  std::size_t layer_count() const { return layers_; }
  std::size_t cell_count() const { return cells_; }

  double operator()(std::size_t k, std::size_t i) const {
    return g_[k * cells_ + i];
  }
  double& operator()(std::size_t k, std::size_t i) { return g_[k * cells_ + i]; }

  /// G at interface k seen as a signed rate; boundary interfaces return 0.
  double at_or_zero(int k, std::size_t i) const {
    if (k < 0 || k >= int(layers_) - 1) return 0.0;
    return g_[std::size_t(k) * cells_ + i];
  }

private:
  std::size_t layers_;
  std::size_t cells_;
  std::vector<double> g_;
};

/// Upwind interface velocity: the donor layer is chosen by the sign of G.
inline double upwind_interface_velocity(double G, double u_below,
                                        double u_above) {
  return G > 0.0 ? u_above : u_below;
}

namespace detail {

struct NeighborState {
  double h;
  double zb;
  const double* u;  // layer velocities, possibly negated copy for walls
};

// Layer velocities of every cell, desingularized.
inline std::vector<double> all_velocities(const FlowState& state,
                                          const LayerPartition& layers,
                                          const PhysicalParams& params) {
  std::size_t n = state.cell_count(), nl = layers.count();
  std::vector<double> u(nl * n);
  for (std::size_t a = 0; a < nl; ++a)
    for (std::size_t i = 0; i < n; ++i)
      u[a * n + i] = velocity(state, layers, params, a, i);
  return u;
}

}  // namespace detail

/// CFL time step: beta times the tighter of the two stability bounds
///   (1/2) dx / (|u| + sqrt(2 g h))  and  dx / (|u| + 2 sqrt(2 g h)).
/// A fully dry domain has no wave speeds; dt_max is returned.
inline double compute_dt(const FlowState& state, const Grid1D& grid,
                         const Topography& /*topo*/,
                         const LayerPartition& layers,
                         const PhysicalParams& params) {
  double dt = params.dt_max;
  bool any_wet = false;
  std::size_t n = state.cell_count();
  for (std::size_t i = 0; i < n; ++i) {
    double h = state.h(i);
    if (h <= params.dry_tol) continue;
    any_wet = true;
    double c2 = std::sqrt(2.0 * params.g * h);
    double dx = grid.width(i);
    for (std::size_t a = 0; a < layers.count(); ++a) {
      double au = std::abs(velocity(state, layers, params, a, i));
      double bound = std::min(0.5 * dx / (au + c2), dx / (au + 2.0 * c2));
      dt = std::min(dt, params.cfl_safety * bound);
    }
  }
  return any_wet ? dt : params.dt_max;
}

struct ExplicitResult {
  std::vector<double> h_star;  // starred layer depths, layer-major N x cells
  std::vector<double> q_star;  // starred layer momenta, layer-major
  std::vector<double> h_new;   // total depth after the step, per cell
  ExchangeField exchange;
  // Reconstructed interface depths, per interface 0..cells (diagnostics).
  std::vector<double> h_left_star;
  std::vector<double> h_right_star;

  ExplicitResult(std::size_t layers, std::size_t cells)
      : h_star(layers * cells), q_star(layers * cells), h_new(cells),
        exchange(layers, cells), h_left_star(cells + 1),
        h_right_star(cells + 1) {}
};

/// Explicit kinetic transport step with hydrostatic reconstruction, plus
/// assembly of the mass-exchange field used by the implicit solve.
inline ExplicitResult explicit_step(const FlowState& state, const Grid1D& grid,
                                    const Topography& topo,
                                    const LayerPartition& layers,
                                    const PhysicalParams& params, double dt) {
  std::size_t n = state.cell_count();
  std::size_t nl = layers.count();
  if (topo.size() != n)
    throw std::invalid_argument("explicit_step: topography size mismatch");

  {
    double bound = compute_dt(state, grid, topo, layers, params);
    if (dt > bound * (1.0 + 1e-12))
      throw CflViolation("explicit_step: dt " + std::to_string(dt) +
                         " exceeds CFL bound " + std::to_string(bound));
  }

  std::vector<double> u = detail::all_velocities(state, layers, params);

  // Ghost cells: periodic wrap, or mirrored state with negated velocities.
  bool periodic = grid.boundary() == Boundary::periodic;
  auto left_of = [&](std::size_t edge) -> long {
    if (edge > 0) return long(edge) - 1;
    return periodic ? long(n) - 1 : -1;  // -1: mirror of cell 0
  };
  auto right_of = [&](std::size_t edge) -> long {
    if (edge < n) return long(edge);
    return periodic ? 0 : -2;  // -2: mirror of cell n-1
  };

  ExplicitResult res(nl, n);
  // Per-interface fluxes, layer-major over (layer, edge).
  std::vector<double> Fh(nl * (n + 1)), Fq_left(nl * (n + 1)),
      Fq_right(nl * (n + 1));
  std::vector<double> u_ghost(nl);

  for (std::size_t e = 0; e <= n; ++e) {
    long li = left_of(e), ri = right_of(e);
    double hL, hR, zL, zR;
    const double *uL, *uR;
    if (li >= 0) {
      hL = state.h(li);
      zL = topo[li];
      uL = nullptr;
    } else {
      hL = state.h(0);
      zL = topo[0];
      uL = u_ghost.data();
      for (std::size_t a = 0; a < nl; ++a) u_ghost[a] = -u[a * n + 0];
    }
    if (ri >= 0) {
      hR = state.h(ri);
      zR = topo[ri];
      uR = nullptr;
    } else {
      hR = state.h(n - 1);
      zR = topo[n - 1];
      uR = u_ghost.data();
      for (std::size_t a = 0; a < nl; ++a) u_ghost[a] = -u[a * n + (n - 1)];
    }

    InterfaceStates st = reconstruct(hL, hR, zL, zR);
    res.h_left_star[e] = st.h_left_star;
    res.h_right_star[e] = st.h_right_star;

    for (std::size_t a = 0; a < nl; ++a) {
      double l = layers.fraction(a);
      double uLa = uL ? uL[a] : u[a * n + std::size_t(li)];
      double uRa = uR ? uR[a] : u[a * n + std::size_t(ri)];
      HalfFluxes fl = half_fluxes(st.h_left_star, uLa, l, params.g);
      HalfFluxes fr = half_fluxes(st.h_right_star, uRa, l, params.g);
      Fh[a * (n + 1) + e] = fl.f_h_plus + fr.f_h_minus;
      double f_q_kin = fl.f_q_plus + fr.f_q_minus;
      Fq_left[a * (n + 1) + e] =
          f_q_kin +
          0.5 * params.g * l * (hL * hL - st.h_left_star * st.h_left_star);
      Fq_right[a * (n + 1) + e] =
          f_q_kin +
          0.5 * params.g * l * (hR * hR - st.h_right_star * st.h_right_star);
    }
  }

  // Conservative update of the starred layer quantities.
  for (std::size_t i = 0; i < n; ++i) {
    double sigma = dt / grid.width(i);
    double h_new = 0.0;
    for (std::size_t a = 0; a < nl; ++a) {
      double mass_diff = Fh[a * (n + 1) + i + 1] - Fh[a * (n + 1) + i];
      double mom_diff =
          Fq_left[a * (n + 1) + i + 1] - Fq_right[a * (n + 1) + i];
      double hs = layers.fraction(a) * state.h(i) - sigma * mass_diff;
      res.h_star[a * n + i] = hs;
      res.q_star[a * n + i] = state.q(a, i) - sigma * mom_diff;
      h_new += hs;
    }
    res.h_new[i] = h_new;

    // Exchange rates from partial mass-flux differences:
    //   dx G_{k+1/2} = sum_{j<=k} (dF_j - l_j sum_p dF_p).
    if (nl > 1) {
      double total = 0.0;
      for (std::size_t a = 0; a < nl; ++a)
        total += Fh[a * (n + 1) + i + 1] - Fh[a * (n + 1) + i];
      double partial = 0.0;
      for (std::size_t k = 0; k + 1 < nl; ++k) {
        double diff = Fh[k * (n + 1) + i + 1] - Fh[k * (n + 1) + i];
        partial += diff - layers.fraction(k) * total;
        res.exchange(k, i) = partial / grid.width(i);
      }
    }
  }
  return res;
}

namespace detail {

// Thomas elimination without pivoting; A^T is strictly diagonally dominant.
inline void solve_tridiagonal(std::vector<double>& sub,
                              std::vector<double>& diag,
                              std::vector<double>& sup,
                              std::vector<double>& rhs) {
  std::size_t n = diag.size();
  for (std::size_t k = 1; k < n; ++k) {
    double m = sub[k] / diag[k - 1];
    diag[k] -= m * sup[k - 1];
    rhs[k] -= m * rhs[k - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t k = n - 1; k-- > 0;)
    rhs[k] = (rhs[k] - sup[k] * rhs[k + 1]) / diag[k];
}

}  // namespace detail

/// Coefficients of the column matrix A = I + dt G for one cell. Row k couples
/// layer k to its neighbors through the upwinded exchange rates, with
/// |G|_+ = max(G,0), |G|_- = min(G,0):
///   sub_k  =  dt |G_{k-1/2}|_- / h_{k-1},
///   diag_k =  1 - dt (|G_{k+1/2}|_- - |G_{k-1/2}|_+) / h_k,
///   sup_k  = -dt |G_{k+1/2}|_+ / h_{k+1}.
struct VerticalSystem {
  std::vector<double> sub, diag, sup;
};

inline VerticalSystem assemble_vertical_system(
    const std::vector<double>& G,  // N-1 interior interface rates
    double h_new, const LayerPartition& layers, double dt) {
  std::size_t nl = layers.count();
  if (G.size() + 1 != nl)
    throw std::invalid_argument("assemble_vertical_system: G size mismatch");
  VerticalSystem s;
  s.sub.assign(nl, 0.0);
  s.diag.assign(nl, 1.0);
  s.sup.assign(nl, 0.0);
  for (std::size_t k = 0; k < nl; ++k) {
    double g_up = k + 1 < nl ? G[k] : 0.0;    // G_{k+1/2}
    double g_dn = k > 0 ? G[k - 1] : 0.0;     // G_{k-1/2}
    double h_k = layers.fraction(k) * h_new;
    s.diag[k] = 1.0 - dt * (std::min(g_up, 0.0) - std::max(g_dn, 0.0)) / h_k;
    if (k > 0) s.sub[k] = dt * std::min(g_dn, 0.0) / (layers.fraction(k - 1) * h_new);
    if (k + 1 < nl)
      s.sup[k] = -dt * std::max(g_up, 0.0) / (layers.fraction(k + 1) * h_new);
  }
  return s;
}

/// Implicit vertical momentum solve for one column: A q = q*. Dry columns
/// are zeroed without solving.
inline std::vector<double> implicit_vertical_solve(
    const std::vector<double>& q_star, const std::vector<double>& G,
    double h_new, const LayerPartition& layers, double dt, double h_eps) {
  std::size_t nl = layers.count();
  if (q_star.size() != nl)
    throw std::invalid_argument("implicit_vertical_solve: size mismatch");
  for (double v : q_star)
    if (!std::isfinite(v))
      throw std::invalid_argument("implicit_vertical_solve: non-finite input");
  if (h_new <= h_eps) return std::vector<double>(nl, 0.0);
  if (nl == 1) return q_star;
  VerticalSystem s = assemble_vertical_system(G, h_new, layers, dt);
  std::vector<double> rhs = q_star;
  detail::solve_tridiagonal(s.sub, s.diag, s.sup, rhs);
  return rhs;
}

struct EulerStepResult {
  FlowState state;
  double dt = 0.0;
  ExchangeField exchange;
  std::vector<double> h_left_star;   // per interface, for the energy bound
  std::vector<double> h_right_star;  // per interface
};

/// One full IMEX step: CFL, explicit kinetic transport, implicit vertical
/// momentum exchange. Pass dt <= 0 to use the CFL step; a forced dt above
/// the bound is rejected, not clamped.
inline EulerStepResult euler_step(const FlowState& state, const Grid1D& grid,
                                  const Topography& topo,
                                  const LayerPartition& layers,
                                  const PhysicalParams& params,
                                  double forced_dt = 0.0) {
  double dt = forced_dt > 0.0 ? forced_dt
                              : compute_dt(state, grid, topo, layers, params);
  ExplicitResult ex = explicit_step(state, grid, topo, layers, params, dt);

  std::size_t n = state.cell_count();
  std::size_t nl = layers.count();
  std::vector<double> q_new(nl * n, 0.0);
  std::vector<double> q_col(nl), g_col(nl > 1 ? nl - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < nl; ++a) q_col[a] = ex.q_star[a * n + i];
    for (std::size_t k = 0; k + 1 < nl; ++k) g_col[k] = ex.exchange(k, i);
    std::vector<double> sol = implicit_vertical_solve(
        q_col, g_col, ex.h_new[i], layers, dt, params.dry_tol);
    for (std::size_t a = 0; a < nl; ++a) q_new[a * n + i] = sol[a];
  }

  FlowState next(nl, ex.h_new, std::move(q_new), state.time() + dt);
  next.enforce_dry(params.dry_tol);
  return EulerStepResult{std::move(next), dt, std::move(ex.exchange),
                         std::move(ex.h_left_star), std::move(ex.h_right_star)};
}

}  // namespace mlswe

#endif  // MLSWE_EULER_STEP_HPP
