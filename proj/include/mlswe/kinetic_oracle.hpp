#ifndef MLSWE_KINETIC_ORACLE_HPP
#define MLSWE_KINETIC_ORACLE_HPP

// Reference scheme that evolves the kinetic densities M_{alpha,i}(xi) on an
// explicit xi-grid. Slow by construction; used to certify that the
// macroscopic solver equals the moments of the kinetic scheme. Not part of
// the production path.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mlswe/core.hpp"
#include "mlswe/euler_step.hpp"
#include "mlswe/kinetic.hpp"
#include "mlswe/reconstruction.hpp"

namespace mlswe {

class KineticGrid {
public:
  KineticGrid(double xi_min, double xi_max, std::size_t nodes) {
    if (nodes < 64)
      throw std::invalid_argument("KineticGrid: need at least 64 nodes");
    if (!(xi_max > xi_min))
      throw std::invalid_argument("KineticGrid: empty range");
    nodes_.resize(nodes);
    dxi_ = (xi_max - xi_min) / double(nodes - 1);
    // Snap the grid so xi = 0 is a node: the upwind switch then sits at the
    // same relative position on every refinement level.
    double lo = std::floor(xi_min / dxi_) * dxi_;
    for (std::size_t k = 0; k < nodes; ++k) nodes_[k] = lo + dxi_ * k;
  }

  /// Grid covering every Maxwellian support of the state with a margin.
  static KineticGrid covering(const FlowState& state,
                              const LayerPartition& layers,
                              const PhysicalParams& params, std::size_t nodes,
                              double margin = 1.0) {
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < state.cell_count(); ++i) {
      double c2 = std::sqrt(2.0 * params.g * state.h(i));
      for (std::size_t a = 0; a < layers.count(); ++a) {
        double u = velocity(state, layers, params, a, i);
        lo = std::min(lo, u - c2);
        hi = std::max(hi, u + c2);
      }
    }
    return KineticGrid(lo - margin, hi + margin, nodes);
  }

  std::size_t size() const { return nodes_.size(); }
  double node(std::size_t k) const { return nodes_[k]; }
  double weight() const { return dxi_; }
  double min() const { return nodes_.front(); }
  double max() const { return nodes_.back(); }

private:
  std::vector<double> nodes_;
  double dxi_ = 0.0;
};

/// Exact average of the Maxwellian over the bin [xi_lo, xi_hi]; the closed
/// form removes the square-root endpoint error a sampled quadrature would
/// pick up at the edges of the support.
inline double maxwellian_bin_average(double h, double u, double l_alpha,
                                     double g, double xi_lo, double xi_hi) {
  if (2.0 * g * h < 64.0 * std::numeric_limits<double>::min()) return 0.0;
  double c = std::sqrt(0.5 * g * h);
  ChiPartialMoments m = chi_partial_moments((xi_lo - u) / c, (xi_hi - u) / c);
  return l_alpha * h * m.m0 / (xi_hi - xi_lo);
}

/// Densities M(layer, cell, xi-node), layer-major then cell-major. Each node
/// value represents the bin average over [xi_k - dxi/2, xi_k + dxi/2].
class KineticField {
public:
  KineticField(std::size_t layers, std::size_t cells, std::size_t nodes)
      : layers_(layers), cells_(cells), nodes_(nodes),
        m_(layers * cells * nodes, 0.0) {}

  double operator()(std::size_t a, std::size_t i, std::size_t k) const {
    return m_[(a * cells_ + i) * nodes_ + k];
  }
  double& operator()(std::size_t a, std::size_t i, std::size_t k) {
    return m_[(a * cells_ + i) * nodes_ + k];
  }

  std::size_t layer_count() const { return layers_; }
  std::size_t cell_count() const { return cells_; }
  std::size_t node_count() const { return nodes_; }

private:
  std::size_t layers_, cells_, nodes_;
  std::vector<double> m_;
};

inline KineticField project_to_kinetic(const FlowState& state,
                                       const LayerPartition& layers,
                                       const PhysicalParams& params,
                                       const KineticGrid& grid) {
  for (std::size_t i = 0; i < state.cell_count(); ++i) {
    double c2 = std::sqrt(2.0 * params.g * state.h(i));
    for (std::size_t a = 0; a < layers.count(); ++a) {
      double u = velocity(state, layers, params, a, i);
      if (u - c2 < grid.min() || u + c2 > grid.max())
        throw std::invalid_argument(
            "project_to_kinetic: grid does not cover the support");
    }
  }
  KineticField f(layers.count(), state.cell_count(), grid.size());
  for (std::size_t a = 0; a < layers.count(); ++a)
    for (std::size_t i = 0; i < state.cell_count(); ++i) {
      double u = velocity(state, layers, params, a, i);
      double half = 0.5 * grid.weight();
      for (std::size_t k = 0; k < grid.size(); ++k)
        f(a, i, k) =
            maxwellian_bin_average(state.h(i), u, layers.fraction(a), params.g,
                                   grid.node(k) - half, grid.node(k) + half);
    }
  return f;
}

/// Moments (h_alpha, q_alpha) of the field. With bin-averaged densities the
/// mass moment is exact for Maxwellian data and the momentum moment is a
/// midpoint sum, second order in dxi.
inline void kinetic_moments(const KineticField& f, const KineticGrid& grid,
                            std::vector<double>& h_alpha,
                            std::vector<double>& q_alpha) {
  std::size_t nl = f.layer_count(), n = f.cell_count();
  h_alpha.assign(nl * n, 0.0);
  q_alpha.assign(nl * n, 0.0);
  for (std::size_t a = 0; a < nl; ++a)
    for (std::size_t i = 0; i < n; ++i) {
      double m0 = 0.0, m1 = 0.0;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        m0 += f(a, i, k);
        m1 += grid.node(k) * f(a, i, k);
      }
      h_alpha[a * n + i] = grid.weight() * m0;
      q_alpha[a * n + i] = grid.weight() * m1;
    }
}

/// One IMEX step of the kinetic scheme: upwinded transport on the
/// hydrostatically reconstructed interface densities with the (xi - u)
/// topography source, then the per-(cell, xi) vertical tridiagonal solve.
inline KineticField kinetic_step(const KineticField& field,
                                 const FlowState& state, const Grid1D& grid,
                                 const Topography& topo,
                                 const LayerPartition& layers,
                                 const PhysicalParams& params,
                                 const KineticGrid& kgrid, double dt) {
  std::size_t n = state.cell_count(), nl = layers.count(),
              nk = kgrid.size();
  bool periodic = grid.boundary() == Boundary::periodic;
  if (!periodic)
    throw std::invalid_argument("kinetic_step: only periodic domains");

  std::vector<double> u(nl * n);
  for (std::size_t a = 0; a < nl; ++a)
    for (std::size_t i = 0; i < n; ++i)
      u[a * n + i] = velocity(state, layers, params, a, i);

  // Reconstructed interface states; edge e sits between cells e-1 and e
  // with wraparound.
  std::vector<InterfaceStates> st(n);
  for (std::size_t e = 0; e < n; ++e) {
    std::size_t li = (e + n - 1) % n, ri = e;
    st[e] = reconstruct(state.h(li), state.h(ri), topo[li], topo[ri]);
  }

  KineticField star(nl, n, nk);
  for (std::size_t a = 0; a < nl; ++a) {
    double l = layers.fraction(a);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t e_left = i, e_right = (i + 1) % n;
      std::size_t left_cell = (i + n - 1) % n, right_cell = (i + 1) % n;
      double sigma = dt / grid.width(i);
      double ui = u[a * n + i];
      double half = 0.5 * kgrid.weight();
      for (std::size_t k = 0; k < nk; ++k) {
        double xi = kgrid.node(k);
        double lo = xi - half, hi = xi + half;
        // Interface densities at the right edge of cell i.
        double m_right_minus = maxwellian_bin_average(
            st[e_right].h_left_star, ui, l, params.g, lo, hi);
        double m_right_plus =
            maxwellian_bin_average(st[e_right].h_right_star,
                                   u[a * n + right_cell], l, params.g, lo, hi);
        double m_right_up = xi > 0.0 ? m_right_minus : m_right_plus;
        // Interface densities at the left edge of cell i.
        double m_left_minus =
            maxwellian_bin_average(st[e_left].h_left_star,
                                   u[a * n + left_cell], l, params.g, lo, hi);
        double m_left_plus = maxwellian_bin_average(st[e_left].h_right_star,
                                                    ui, l, params.g, lo, hi);
        double m_left_up = xi > 0.0 ? m_left_minus : m_left_plus;

        double m_cell = field(a, i, k);
        double delta_right = (xi - ui) * (m_cell - m_right_minus);
        double delta_left = (xi - ui) * (m_cell - m_left_plus);
        star(a, i, k) =
            m_cell - sigma * (xi * m_right_up + delta_right -
                              xi * m_left_up - delta_left);
      }
    }
  }

  // Exchange rates and new depths from the quadrature moments of the
  // starred field, mirroring the macroscopic assembly.
  std::vector<double> h_star, q_star;
  kinetic_moments(star, kgrid, h_star, q_star);
  std::vector<double> h_new(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < nl; ++a) h_new[i] += h_star[a * n + i];

  KineticField next(nl, n, nk);
  if (nl == 1) return star;
  std::vector<double> g_col(nl - 1), m_col(nl);
  for (std::size_t i = 0; i < n; ++i) {
    // dt G_{k+1/2} = sum_{j<=k} (l_j h_new - h*_j), the discrete form of the
    // partial mass balance.
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < nl; ++k) {
      acc += layers.fraction(k) * h_new[i] - h_star[k * n + i];
      g_col[k] = acc / dt;
    }
    if (h_new[i] <= params.dry_tol) continue;
    VerticalSystem sys =
        assemble_vertical_system(g_col, h_new[i], layers, dt);
    for (std::size_t k = 0; k < nk; ++k) {
      std::vector<double> sub = sys.sub, diag = sys.diag, sup = sys.sup;
      for (std::size_t a = 0; a < nl; ++a) m_col[a] = star(a, i, k);
      detail::solve_tridiagonal(sub, diag, sup, m_col);
      for (std::size_t a = 0; a < nl; ++a) next(a, i, k) = m_col[a];
    }
  }
  return next;
}

/// Discrete kinetic entropy sum_{alpha,i,xi} dx dxi l_alpha H(M/l_alpha).
inline double kinetic_entropy(const KineticField& f, const KineticGrid& kgrid,
                              const Grid1D& grid, const Topography& topo,
                              const LayerPartition& layers,
                              const PhysicalParams& params) {
  double total = 0.0;
  double g = params.g;
  for (std::size_t a = 0; a < f.layer_count(); ++a) {
    double l = layers.fraction(a);
    for (std::size_t i = 0; i < f.cell_count(); ++i) {
      double cell = 0.0;
      for (std::size_t k = 0; k < f.node_count(); ++k) {
        double xi = kgrid.node(k);
        double fv = f(a, i, k) / l;
        cell += 0.5 * xi * xi * fv +
                g * g * M_PI * M_PI / 6.0 * fv * fv * fv + g * topo[i] * fv;
      }
      total += grid.width(i) * kgrid.weight() * l * cell;
    }
  }
  return total;
}

}  // namespace mlswe

#endif  // MLSWE_KINETIC_ORACLE_HPP
