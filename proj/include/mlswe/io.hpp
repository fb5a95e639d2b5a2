#ifndef MLSWE_IO_HPP
#define MLSWE_IO_HPP

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mlswe/config.hpp"
#include "mlswe/simulation.hpp"

namespace mlswe {

namespace detail {

// Shortest round-trip decimal form; keeps the files byte-deterministic.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

}  // namespace detail

/// Time-series CSV: a comment block echoing the resolved config, then a
/// header row, then one row per (snapshot, cell). The budget columns repeat
/// the snapshot's totals on every cell row.
inline void write_time_series(std::ostream& out, const ScenarioConfig& cfg,
                              const std::vector<TimeSeriesRecord>& records) {
  for (const std::string& line : describe_config(cfg)) out << "# " << line << "\n";
  Grid1D grid = Grid1D::uniform(cfg.cells, cfg.x_min, cfg.x_max, cfg.boundary);

  out << "time,x,h,eta";
  std::size_t nl = cfg.layer_count;
  for (std::size_t a = 1; a <= nl; ++a) out << ",u_" << a;
  out << ",mass,momentum,energy,energy_delta,topo_error_bound\n";

  for (const TimeSeriesRecord& r : records) {
    std::size_t n = r.h.size();
    for (std::size_t i = 0; i < n; ++i) {
      out << detail::fmt(r.time) << ',' << detail::fmt(grid.center(i)) << ','
          << detail::fmt(r.h[i]) << ',' << detail::fmt(r.eta[i]);
      for (std::size_t a = 0; a < nl; ++a)
        out << ',' << detail::fmt(r.u[a * n + i]);
      out << ',' << detail::fmt(r.budget.total_mass) << ','
          << detail::fmt(r.budget.total_momentum) << ','
          << detail::fmt(r.budget.total_energy) << ','
          << detail::fmt(r.budget.step_energy_delta) << ','
          << detail::fmt(r.budget.topo_error_bound) << '\n';
    }
  }
}

/// Final JSON summary of a run.
inline nlohmann::json run_summary(const ScenarioConfig& cfg,
                                  const RunResult& run) {
  nlohmann::json j;
  j["ok"] = run.ok;
  if (!run.ok) j["failure"] = run.failure;
  j["steps"] = run.steps;
  j["final_time"] = run.final_state.time();
  j["cells"] = cfg.cells;
  j["layers"] = cfg.layer_count;
  j["min_depth"] = run.min_depth;
  j["initial"] = {{"mass", run.initial_mass},
                  {"momentum", run.initial_momentum},
                  {"energy", run.initial_energy}};
  const EnergyBudget& b = run.records.back().budget;
  j["final"] = {{"mass", b.total_mass},
                {"momentum", b.total_momentum},
                {"energy", b.total_energy}};
  j["cumulative_topo_error_bound"] = run.cumulative_topo_bound;
  j["max_energy_overshoot"] = run.max_energy_overshoot;
  j["exchange_bound_ok"] = run.exchange_bound_ok;
  return j;
}

inline void write_run_outputs(const std::string& dir,
                              const ScenarioConfig& cfg,
                              const RunResult& run) {
  std::ofstream csv(dir + "/timeseries.csv");
  if (!csv) throw std::runtime_error("cannot write " + dir + "/timeseries.csv");
  write_time_series(csv, cfg, run.records);
  std::ofstream js(dir + "/summary.json");
  if (!js) throw std::runtime_error("cannot write " + dir + "/summary.json");
  js << run_summary(cfg, run).dump(2) << "\n";
}

inline void write_convergence_table(std::ostream& out,
                                    const ScenarioConfig& cfg,
                                    const std::vector<ConvergenceRow>& table) {
  for (const std::string& line : describe_config(cfg)) out << "# " << line << "\n";
  out << "cells,l1_difference,rate,topo_error_bound,topo_bound_ratio,"
         "energy_overshoot\n";
  for (const ConvergenceRow& r : table)
    out << r.cells << ',' << detail::fmt(r.l1_difference) << ','
        << detail::fmt(r.rate) << ',' << detail::fmt(r.topo_bound) << ','
        << detail::fmt(r.topo_ratio) << ',' << detail::fmt(r.energy_overshoot)
        << '\n';
}

inline void write_audit_report(std::ostream& out, const AuditReport& rep) {
  for (const AuditCheck& c : rep.checks) {
    const char* verdict = !c.applicable ? "SKIP" : c.pass ? "PASS" : "FAIL";
    out << verdict << "  " << c.name << ": " << c.detail << "\n";
  }
  out << (rep.all_pass() ? "audit: all checks passed"
                         : "audit: FAILURES detected")
      << "\n";
}

}  // namespace mlswe

#endif  // MLSWE_IO_HPP
