#ifndef MLSWE_SIMULATION_HPP
#define MLSWE_SIMULATION_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mlswe/config.hpp"
#include "mlswe/core.hpp"
#include "mlswe/diagnostics.hpp"
#include "mlswe/euler_step.hpp"
#include "mlswe/viscous.hpp"

namespace mlswe {

/// One output snapshot: per-cell fields plus the step's budget.
struct TimeSeriesRecord {
  double time = 0.0;
  std::vector<double> h;    // per cell
  std::vector<double> eta;  // per cell
  std::vector<double> u;    // layer-major, N x cells
  EnergyBudget budget;
};

struct RunResult {
  FlowState final_state;
  std::vector<TimeSeriesRecord> records;
  std::size_t steps = 0;
  double min_depth = 0.0;
  double cumulative_topo_bound = 0.0;  // sum of dt_n * bound_n
  double max_energy_overshoot = 0.0;   // max over steps of E - E(0)
  double initial_mass = 0.0;
  double initial_momentum = 0.0;
  double initial_energy = 0.0;
  bool exchange_bound_ok = true;  // 1 - 1/l_1 <= dt G_{3/2}/h <= 1
  bool ok = true;
  std::string failure;
};

namespace detail {

inline TimeSeriesRecord make_record(const FlowState& state, const Grid1D& grid,
                                    const Topography& topo,
                                    const LayerPartition& layers,
                                    const PhysicalParams& params,
                                    const EnergyBudget& budget) {
  std::size_t n = state.cell_count(), nl = layers.count();
  TimeSeriesRecord r;
  r.time = state.time();
  r.h.resize(n);
  r.eta.resize(n);
  r.u.resize(nl * n);
  for (std::size_t i = 0; i < n; ++i) {
    r.h[i] = state.h(i);
    r.eta[i] = free_surface(state, topo, i);
    for (std::size_t a = 0; a < nl; ++a)
      r.u[a * n + i] = velocity(state, layers, params, a, i);
  }
  r.budget = budget;
  return r;
}

}  // namespace detail

/// Advances the scenario to end_time with the IMEX step (plus the viscous
/// step when mu or friction is nonzero), recording snapshots every
/// output_every accepted steps. Stops with ok = false on a CFL rejection,
/// a negative depth, or an energy increase on a flat bottom.
inline RunResult run_simulation(const ScenarioConfig& cfg) {
  Scenario sc = build_scenario(cfg);
  const PhysicalParams& params = cfg.params;
  bool viscous = params.mu > 0.0 || params.k_l > 0.0 || params.k_t > 0.0;
  ViscousConfig vcfg;
  vcfg.mode = cfg.viscous_mode;

  EnergyBudget budget;
  budget.time = 0.0;
  budget.total_mass = total_mass(sc.state, sc.grid);
  budget.total_momentum = total_momentum(sc.state, sc.grid);
  budget.total_energy =
      total_energy(sc.state, sc.grid, sc.topo, sc.layers, params);

  RunResult res{sc.state, {}, 0, 0.0, 0.0, 0.0,
                budget.total_mass, budget.total_momentum, budget.total_energy,
                true, true, ""};
  res.min_depth = sc.state.h(0);
  for (std::size_t i = 0; i < sc.state.cell_count(); ++i)
    res.min_depth = std::min(res.min_depth, sc.state.h(i));
  res.records.push_back(detail::make_record(sc.state, sc.grid, sc.topo,
                                            sc.layers, params, budget));

  double t = 0.0;
  std::size_t n = sc.state.cell_count();
  while (t < cfg.end_time - 1e-14 * std::max(1.0, cfg.end_time)) {
    double dt = compute_dt(res.final_state, sc.grid, sc.topo, sc.layers, params);
    if (viscous && cfg.viscous_mode == ViscousMode::as_written)
      dt = std::min(dt, parabolic_dt_bound(res.final_state, sc.grid, sc.layers,
                                           params, vcfg));
    dt = std::min(dt, cfg.end_time - t);

    std::optional<EulerStepResult> stepped;
    try {
      stepped = euler_step(res.final_state, sc.grid, sc.topo, sc.layers,
                           params, dt);
    } catch (const CflViolation& e) {
      res.ok = false;
      res.failure = e.what();
      break;
    }
    EulerStepResult& step = *stepped;
    if (viscous) {
      FlowState relaxed = viscous_step(step.state, res.final_state, sc.grid,
                                       sc.layers, params, step.dt, vcfg);
      step.state = std::move(relaxed);
    }

    EnergyBudget next = energy_budget(res.final_state, step, sc.grid, sc.topo,
                                      sc.layers, params, cfg.error_constant);
    res.cumulative_topo_bound += step.dt * next.topo_error_bound;
    res.max_energy_overshoot = std::max(
        res.max_energy_overshoot, next.total_energy - res.initial_energy);

    for (std::size_t i = 0; i < n; ++i) {
      double h = step.state.h(i);
      res.min_depth = std::min(res.min_depth, h);
      if (h < 0.0) {
        res.ok = false;
        res.failure = "negative depth in cell " + std::to_string(i);
      }
      if (sc.layers.count() > 1 && h > params.dry_tol) {
        double r = step.dt * step.exchange(0, i) / h;
        if (r < 1.0 - 1.0 / sc.layers.fraction(0) - 1e-9 || r > 1.0 + 1e-9)
          res.exchange_bound_ok = false;
      }
    }
    if (sc.flat_bottom && !viscous &&
        next.step_energy_delta >
            1e-11 * std::max(1.0, std::abs(next.total_energy))) {
      res.ok = false;
      res.failure = "energy increased on a flat bottom at t = " +
                    std::to_string(next.time);
    }

    res.final_state = std::move(step.state);
    t = res.final_state.time();
    budget = next;
    ++res.steps;
    if (!res.ok) break;
    if (res.steps % cfg.output_every == 0)
      res.records.push_back(detail::make_record(res.final_state, sc.grid,
                                                sc.topo, sc.layers, params,
                                                budget));
  }
  if (res.records.back().time != res.final_state.time())
    res.records.push_back(detail::make_record(res.final_state, sc.grid, sc.topo,
                                              sc.layers, params, budget));
  return res;
}

/// One refinement level of the self-convergence study.
struct ConvergenceRow {
  std::size_t cells = 0;
  double l1_difference = 0.0;  // vs the next finer level, coarsened
  double rate = 0.0;           // log2 ratio of successive differences
  double topo_bound = 0.0;     // cumulative topography error bound
  double topo_ratio = 0.0;     // coarse bound / this bound
  double energy_overshoot = 0.0;
};

/// Reruns the scenario at dx, dx/2, ..., comparing depths between levels by
/// averaging fine pairs onto coarse cells.
inline std::vector<ConvergenceRow> convergence_study(const ScenarioConfig& cfg,
                                                     std::size_t levels) {
  if (levels < 2)
    throw std::invalid_argument("convergence_study: need at least 2 levels");
  std::vector<RunResult> runs;
  std::vector<std::size_t> sizes;
  for (std::size_t lev = 0; lev < levels; ++lev) {
    ScenarioConfig c = cfg;
    c.cells = cfg.cells << lev;
    c.output_every = std::size_t(-1);  // endpoints only
    RunResult r = run_simulation(c);
    if (!r.ok)
      throw std::runtime_error("convergence_study: level " +
                               std::to_string(lev) + " failed: " + r.failure);
    runs.push_back(std::move(r));
    sizes.push_back(c.cells);
  }

  double dx0 = (cfg.x_max - cfg.x_min) / double(cfg.cells);
  std::vector<ConvergenceRow> table(levels);
  for (std::size_t lev = 0; lev < levels; ++lev) {
    table[lev].cells = sizes[lev];
    table[lev].topo_bound = runs[lev].cumulative_topo_bound;
    table[lev].energy_overshoot = runs[lev].max_energy_overshoot;
    if (lev > 0 && table[lev].topo_bound > 0.0)
      table[lev].topo_ratio = table[lev - 1].topo_bound / table[lev].topo_bound;
    if (lev + 1 < levels) {
      const FlowState& coarse = runs[lev].final_state;
      const FlowState& fine = runs[lev + 1].final_state;
      double dx = dx0 / double(1u << lev);
      double err = 0.0;
      for (std::size_t i = 0; i < sizes[lev]; ++i) {
        double avg = 0.5 * (fine.h(2 * i) + fine.h(2 * i + 1));
        err += dx * std::abs(coarse.h(i) - avg);
      }
      table[lev].l1_difference = err;
      if (lev > 0 && err > 0.0)
        table[lev].rate = std::log2(table[lev - 1].l1_difference / err);
    }
  }
  return table;
}

struct AuditCheck {
  std::string name;
  bool pass = false;
  bool applicable = true;
  std::string detail;
};

struct AuditReport {
  std::vector<AuditCheck> checks;
  bool all_pass() const {
    for (const AuditCheck& c : checks)
      if (c.applicable && !c.pass) return false;
    return true;
  }
};

/// Invariant battery on a scenario: positivity, mass, momentum,
/// well-balance, energy, the layer-exchange bound, CFL rejection of an
/// oversized step, and seeded random checks of the vertical linear system.
inline AuditReport run_audit(const ScenarioConfig& cfg, unsigned seed = 0) {
  AuditReport rep;
  Scenario sc = build_scenario(cfg);
  const PhysicalParams& params = cfg.params;
  bool viscous = params.mu > 0.0 || params.k_l > 0.0 || params.k_t > 0.0;
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return std::string(buf);
  };

  RunResult run = run_simulation(cfg);

  rep.checks.push_back({"positivity", run.min_depth >= 0.0, true,
                        "min depth " + num(run.min_depth)});

  double mass_drift =
      std::abs(total_mass(run.final_state, sc.grid) - run.initial_mass) /
      std::max(1.0, std::abs(run.initial_mass));
  rep.checks.push_back(
      {"mass_conservation", mass_drift <= 1e-13 * double(run.steps + 1), true,
       "relative drift " + num(mass_drift) + " over " +
           std::to_string(run.steps) + " steps"});

  bool momentum_applies = sc.flat_bottom &&
                          cfg.boundary == Boundary::periodic && !viscous;
  double mom_drift = std::abs(total_momentum(run.final_state, sc.grid) -
                              run.initial_momentum);
  rep.checks.push_back({"momentum_conservation",
                        mom_drift <= 1e-11 * double(run.steps + 1),
                        momentum_applies,
                        momentum_applies
                            ? "drift " + num(mom_drift)
                            : "skipped: topography or friction sources"});

  bool at_rest = true;
  for (std::size_t a = 0; a < sc.state.layer_count() && at_rest; ++a)
    for (std::size_t i = 0; i < sc.state.cell_count(); ++i)
      if (sc.state.q(a, i) != 0.0) {
        at_rest = false;
        break;
      }
  bool flat_surface = true;
  double eta0 = free_surface(sc.state, sc.topo, 0);
  for (std::size_t i = 0; i < sc.state.cell_count(); ++i)
    if (std::abs(free_surface(sc.state, sc.topo, i) - eta0) > 1e-12)
      flat_surface = false;
  bool wb_applies = at_rest && flat_surface;
  double wb = wb_applies ? well_balance_residual(sc.state, sc.grid, sc.topo,
                                                 sc.layers, params)
                         : 0.0;
  rep.checks.push_back({"well_balance", wb <= 1e-12, wb_applies,
                        wb_applies ? "one-step residual " + num(wb)
                                   : "skipped: not a lake at rest"});

  bool energy_applies = sc.flat_bottom && !viscous;
  rep.checks.push_back(
      {"energy_dissipation", run.ok, energy_applies,
       energy_applies ? "no step increased the total energy"
                      : "skipped: topography error bound applies instead"});

  rep.checks.push_back({"layer_exchange_bound", run.exchange_bound_ok,
                        sc.layers.count() > 1,
                        sc.layers.count() > 1
                            ? "dt G / h within [1 - 1/l_1, 1] on wet cells"
                            : "skipped: single layer"});

  bool cfl_rejected = false;
  try {
    double dt = compute_dt(sc.state, sc.grid, sc.topo, sc.layers, params);
    euler_step(sc.state, sc.grid, sc.topo, sc.layers, params, 10.0 * dt);
  } catch (const CflViolation&) {
    cfl_rejected = true;
  }
  rep.checks.push_back({"cfl_rejection", cfl_rejected, true,
                        "forced 10x step raises CflViolation"});

  // Randomized vertical-system properties: rows sum to one under transpose,
  // the inverse is nonnegative, and solves with the transpose contract the
  // max norm.
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> gdist(-3.0, 3.0), hdist(0.1, 5.0),
      tdist(0.001, 0.2);
  LayerPartition rl = sc.layers.count() > 1 ? sc.layers
                                            : LayerPartition::uniform(3);
  std::size_t nl = rl.count();
  bool linsys_ok = true;
  std::string linsys_msg = "1000 random assemblies pass";
  for (int trial = 0; trial < 1000 && linsys_ok; ++trial) {
    double h = hdist(rng), dt = tdist(rng);
    std::vector<double> G(nl - 1);
    double gmax = rl.fraction(0) * h / dt;  // keep rates step-compatible
    for (double& g : G) g = gdist(rng) / 3.0 * gmax;
    VerticalSystem sys = assemble_vertical_system(G, h, rl, dt);
    // Mass consistency: columns of A weighted by the layer masses sum back
    // to the layer mass, so the solve redistributes without creating mass.
    for (std::size_t k = 0; k < nl && linsys_ok; ++k) {
      double col = sys.diag[k] * rl.fraction(k) * h;
      if (k > 0) col += sys.sup[k - 1] * rl.fraction(k - 1) * h;
      if (k + 1 < nl) col += sys.sub[k + 1] * rl.fraction(k + 1) * h;
      if (std::abs(col - rl.fraction(k) * h) > 1e-10 * h) {
        linsys_ok = false;
        linsys_msg = "column mass identity violated";
      }
    }
    // Inverse positivity: solving against unit vectors stays nonnegative.
    for (std::size_t j = 0; j < nl && linsys_ok; ++j) {
      std::vector<double> sub = sys.sub, diag = sys.diag, sup = sys.sup;
      std::vector<double> e(nl, 0.0);
      e[j] = 1.0;
      detail::solve_tridiagonal(sub, diag, sup, e);
      for (double v : e)
        if (v < -1e-12) {
          linsys_ok = false;
          linsys_msg = "inverse has a negative entry";
        }
    }
  }
  rep.checks.push_back({"vertical_system_random", linsys_ok, true, linsys_msg});

  return rep;
}

}  // namespace mlswe

#endif  // MLSWE_SIMULATION_HPP
