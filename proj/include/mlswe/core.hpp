#ifndef MLSWE_CORE_HPP
#define MLSWE_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iostream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlswe {

/// Vertical partition of the water column into N layers of relative
/// thickness l_alpha, with l_alpha > 0 and sum l_alpha = 1.
class LayerPartition {
public:
  explicit LayerPartition(std::vector<double> fractions)
      : fractions_(std::move(fractions)) {
    if (fractions_.empty())
      throw std::invalid_argument("LayerPartition: need at least one layer");
    double sum = 0.0;
    for (double l : fractions_) {
      if (!(l > 0.0) || !std::isfinite(l))
        throw std::invalid_argument("LayerPartition: fractions must be positive");
      sum += l;
    }
    if (std::abs(sum - 1.0) > 1e-8)
      std::cerr << "LayerPartition: fractions sum to " << sum
                << ", renormalizing\n";
    for (double& l : fractions_) l /= sum;
  }

  static LayerPartition uniform(std::size_t count) {
    return LayerPartition(std::vector<double>(count, 1.0 / double(count)));
  }

  std::size_t count() const { return fractions_.size(); }
  double fraction(std::size_t alpha) const { return fractions_.at(alpha); }
  const std::vector<double>& fractions() const { return fractions_; }

private:
  std::vector<double> fractions_;
};

enum class Boundary { periodic, reflective };

/// 1D finite-volume grid: cells C_i = ]x_{i-1/2}, x_{i+1/2}[.
class Grid1D {
public:
  Grid1D(std::vector<double> edges, Boundary boundary)
      : edges_(std::move(edges)), boundary_(boundary) {
    if (edges_.size() < 2)
      throw std::invalid_argument("Grid1D: need at least one cell");
    widths_.resize(edges_.size() - 1);
    for (std::size_t i = 0; i + 1 < edges_.size(); ++i) {
      widths_[i] = edges_[i + 1] - edges_[i];
      if (!(widths_[i] > 0.0))
        throw std::invalid_argument("Grid1D: edges must be strictly increasing");
    }
  }

  static Grid1D uniform(std::size_t cells, double xmin, double xmax,
                        Boundary boundary) {
    if (cells < 1 || !(xmax > xmin))
      throw std::invalid_argument("Grid1D: bad uniform grid spec");
    std::vector<double> edges(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i)
      edges[i] = xmin + (xmax - xmin) * double(i) / double(cells);
    return Grid1D(std::move(edges), boundary);
  }

  std::size_t cell_count() const { return widths_.size(); }
  double width(std::size_t i) const { return widths_[i]; }
  double edge(std::size_t i) const { return edges_[i]; }
  double center(std::size_t i) const { return 0.5 * (edges_[i] + edges_[i + 1]); }
  double min_width() const {
    return *std::min_element(widths_.begin(), widths_.end());
  }
  Boundary boundary() const { return boundary_; }

private:
  std::vector<double> edges_;
  std::vector<double> widths_;
  Boundary boundary_;
};

/// Piecewise-constant bottom elevation z_b, fixed in time.
class Topography {
public:
  explicit Topography(std::vector<double> zb) : zb_(std::move(zb)) {
    for (double z : zb_)
      if (!std::isfinite(z))
        throw std::invalid_argument("Topography: non-finite bottom elevation");
  }

  static Topography flat(std::size_t cells, double level = 0.0) {
    return Topography(std::vector<double>(cells, level));
  }

  std::size_t size() const { return zb_.size(); }
  double operator[](std::size_t i) const { return zb_[i]; }
  const std::vector<double>& values() const { return zb_; }

private:
  std::vector<double> zb_;
};

struct PhysicalParams {
  double g = 9.81;          // gravity
  double mu = 0.0;          // dynamic viscosity
  double k_l = 0.0;         // laminar friction
  double k_t = 0.0;         // turbulent friction
  double cfl_safety = 0.9;  // beta in (0,1)
  double dry_tol = 1e-10;   // h_eps
  double dt_max = 1.0;      // fallback step on a fully dry domain

  void validate() const {
    if (!(g > 0.0)) throw std::invalid_argument("PhysicalParams: g must be > 0");
    if (mu < 0.0) throw std::invalid_argument("PhysicalParams: mu must be >= 0");
    if (k_l < 0.0 || k_t < 0.0)
      throw std::invalid_argument("PhysicalParams: friction must be >= 0");
    if (!(cfl_safety > 0.0) || !(cfl_safety < 1.0))
      throw std::invalid_argument("PhysicalParams: cfl_safety must be in (0,1)");
    if (dry_tol < 0.0)
      throw std::invalid_argument("PhysicalParams: dry_tol must be >= 0");
    if (!(dt_max > 0.0))
      throw std::invalid_argument("PhysicalParams: dt_max must be > 0");
  }
};

/// Conserved state U = (h, h_1 u_1, ..., h_N u_N) on a grid.
/// Layer momenta are stored one contiguous cell array per layer.
class FlowState {
public:
  FlowState(std::size_t layers, std::vector<double> h, std::vector<double> q,
            double time = 0.0)
      : layers_(layers), cells_(h.size()), h_(std::move(h)), q_(std::move(q)),
        time_(time) {
    if (q_.size() != layers_ * cells_)
      throw std::invalid_argument("FlowState: momentum size mismatch");
    for (double hv : h_)
      if (!(hv >= 0.0))
        throw std::invalid_argument("FlowState: negative depth");
  }

  static FlowState rest(std::size_t layers, std::vector<double> h) {
    std::size_t n = h.size();
    return FlowState(layers, std::move(h), std::vector<double>(layers * n, 0.0));
  }

  std::size_t layer_count() const { return layers_; }
  std::size_t cell_count() const { return cells_; }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }

  double h(std::size_t i) const { return h_[i]; }
  double& h(std::size_t i) { return h_[i]; }
  double q(std::size_t alpha, std::size_t i) const {
    return q_[alpha * cells_ + i];
  }
  double& q(std::size_t alpha, std::size_t i) { return q_[alpha * cells_ + i]; }

  const std::vector<double>& depths() const { return h_; }
  const std::vector<double>& momenta() const { return q_; }

  /// Zeroes all layer momenta of cells with h <= h_eps.
  void enforce_dry(double h_eps) {
    for (std::size_t i = 0; i < cells_; ++i)
      if (h_[i] <= h_eps)
        for (std::size_t a = 0; a < layers_; ++a) q_[a * cells_ + i] = 0.0;
  }

private:
  std::size_t layers_;
  std::size_t cells_;
  std::vector<double> h_;
  std::vector<double> q_;
  double time_;
};

/// h_alpha = l_alpha * h.
inline double layer_depth(const FlowState& state, const LayerPartition& layers,
                          std::size_t alpha, std::size_t i) {
  if (alpha >= layers.count() || i >= state.cell_count())
    throw std::out_of_range("layer_depth: index out of range");
  return layers.fraction(alpha) * state.h(i);
}

/// Desingularized layer velocity q / (l_alpha h); zero on dry cells.
inline double velocity(const FlowState& state, const LayerPartition& layers,
                       const PhysicalParams& params, std::size_t alpha,
                       std::size_t i) {
  double h = state.h(i);
  if (h <= params.dry_tol) return 0.0;
  return state.q(alpha, i) / (layers.fraction(alpha) * h);
}

/// eta = h + z_b.
inline double free_surface(const FlowState& state, const Topography& topo,
                           std::size_t i) {
  return state.h(i) + topo[i];
}

}  // namespace mlswe

#endif  // MLSWE_CORE_HPP
