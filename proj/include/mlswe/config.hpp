#ifndef MLSWE_CONFIG_HPP
#define MLSWE_CONFIG_HPP

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlswe/core.hpp"
#include "mlswe/viscous.hpp"

namespace mlswe {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Full scenario description parsed from a [section] key = value file.
struct ScenarioConfig {
  // [grid]
  std::size_t cells = 100;
  double x_min = 0.0;
  double x_max = 1.0;
  Boundary boundary = Boundary::periodic;

  // [layers]
  std::size_t layer_count = 1;
  std::vector<double> fractions;  // empty = uniform

  // [physics]
  PhysicalParams params;
  ViscousMode viscous_mode = ViscousMode::as_written;

  // [topography]  z_b(x) = level + amplitude * exp(-((x-center)/width)^2)
  std::string topo_type = "flat";  // flat | gaussian_bump
  double topo_level = 0.0;
  double bump_amplitude = 0.0;
  double bump_width = 1.0;
  double bump_center = 0.0;

  // [initial]
  std::string initial_type = "lake_at_rest";  // | dam_break | shear
  double surface_level = 1.0;     // lake_at_rest, shear
  double eta_left = 1.0;          // dam_break: free surface left of the split
  double eta_right = 0.0;         // dam_break: free surface right of the split
  double split = 0.5;             // dam_break
  std::vector<double> layer_velocities;  // shear

  // [run]
  double end_time = 1.0;
  std::size_t output_every = 1;   // record cadence in accepted steps
  std::string output_path = "out";
  double error_constant = 1.0;    // C in the topography error bound

  void validate() const {
    params.validate();
    if (cells < 1) throw ConfigError("grid.cells must be >= 1");
    if (!(x_max > x_min)) throw ConfigError("grid.x_max must exceed grid.x_min");
    if (layer_count < 1) throw ConfigError("layers.count must be >= 1");
    if (!fractions.empty() && fractions.size() != layer_count)
      throw ConfigError("layers.fractions length must equal layers.count");
    if (end_time < 0.0) throw ConfigError("run.end_time must be >= 0");
    if (output_every < 1) throw ConfigError("run.output_every must be >= 1");
    if (topo_type != "flat" && topo_type != "gaussian_bump")
      throw ConfigError("topography.type must be flat or gaussian_bump");
    if (topo_type == "gaussian_bump" && !(bump_width > 0.0))
      throw ConfigError("topography.width must be > 0");
    if (initial_type != "lake_at_rest" && initial_type != "dam_break" &&
        initial_type != "shear")
      throw ConfigError(
          "initial.type must be lake_at_rest, dam_break, or shear");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& value, const std::string& key,
                           int line) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": field '" + key +
                      "': cannot parse '" + value + "' as a number");
  }
  if (pos != value.size())
    throw ConfigError("line " + std::to_string(line) + ": field '" + key +
                      "': trailing characters in '" + value + "'");
  return v;
}

inline std::size_t parse_size(const std::string& value, const std::string& key,
                              int line) {
  double v = parse_double(value, key, line);
  if (v < 0.0 || v != std::floor(v))
    throw ConfigError("line " + std::to_string(line) + ": field '" + key +
                      "': expected a nonnegative integer, got '" + value + "'");
  return std::size_t(v);
}

inline std::vector<double> parse_list(const std::string& value,
                                      const std::string& key, int line) {
  std::vector<double> out;
  std::istringstream is(value);
  std::string tok;
  while (is >> tok) out.push_back(parse_double(tok, key, line));
  if (out.empty())
    throw ConfigError("line " + std::to_string(line) + ": field '" + key +
                      "': expected a list of numbers");
  return out;
}

}  // namespace detail

/// Parses the flat [section] key = value format. '#' and ';' start comments.
inline ScenarioConfig parse_config(std::istream& in) {
  ScenarioConfig cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) +
                          ": unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    std::string full = section.empty() ? key : section + "." + key;

    if (full == "grid.cells")
      cfg.cells = detail::parse_size(value, full, lineno);
    else if (full == "grid.x_min")
      cfg.x_min = detail::parse_double(value, full, lineno);
    else if (full == "grid.x_max")
      cfg.x_max = detail::parse_double(value, full, lineno);
    else if (full == "grid.boundary") {
      if (value == "periodic")
        cfg.boundary = Boundary::periodic;
      else if (value == "reflective")
        cfg.boundary = Boundary::reflective;
      else
        throw ConfigError("line " + std::to_string(lineno) +
                          ": field 'grid.boundary': unknown value '" + value +
                          "'");
    } else if (full == "layers.count")
      cfg.layer_count = detail::parse_size(value, full, lineno);
    else if (full == "layers.fractions") {
      if (value != "uniform") cfg.fractions = detail::parse_list(value, full, lineno);
    } else if (full == "physics.g")
      cfg.params.g = detail::parse_double(value, full, lineno);
    else if (full == "physics.mu")
      cfg.params.mu = detail::parse_double(value, full, lineno);
    else if (full == "physics.k_l")
      cfg.params.k_l = detail::parse_double(value, full, lineno);
    else if (full == "physics.k_t")
      cfg.params.k_t = detail::parse_double(value, full, lineno);
    else if (full == "physics.cfl_safety")
      cfg.params.cfl_safety = detail::parse_double(value, full, lineno);
    else if (full == "physics.dry_tol")
      cfg.params.dry_tol = detail::parse_double(value, full, lineno);
    else if (full == "physics.dt_max")
      cfg.params.dt_max = detail::parse_double(value, full, lineno);
    else if (full == "physics.viscous_mode") {
      if (value == "as_written")
        cfg.viscous_mode = ViscousMode::as_written;
      else if (value == "vertical_implicit")
        cfg.viscous_mode = ViscousMode::vertical_implicit;
      else
        throw ConfigError("line " + std::to_string(lineno) +
                          ": field 'physics.viscous_mode': unknown value '" +
                          value + "'");
    } else if (full == "topography.type")
      cfg.topo_type = value;
    else if (full == "topography.level")
      cfg.topo_level = detail::parse_double(value, full, lineno);
    else if (full == "topography.amplitude")
      cfg.bump_amplitude = detail::parse_double(value, full, lineno);
    else if (full == "topography.width")
      cfg.bump_width = detail::parse_double(value, full, lineno);
    else if (full == "topography.center")
      cfg.bump_center = detail::parse_double(value, full, lineno);
    else if (full == "initial.type")
      cfg.initial_type = value;
    else if (full == "initial.surface_level")
      cfg.surface_level = detail::parse_double(value, full, lineno);
    else if (full == "initial.eta_left")
      cfg.eta_left = detail::parse_double(value, full, lineno);
    else if (full == "initial.eta_right")
      cfg.eta_right = detail::parse_double(value, full, lineno);
    else if (full == "initial.split")
      cfg.split = detail::parse_double(value, full, lineno);
    else if (full == "initial.velocities")
      cfg.layer_velocities = detail::parse_list(value, full, lineno);
    else if (full == "run.end_time")
      cfg.end_time = detail::parse_double(value, full, lineno);
    else if (full == "run.output_every")
      cfg.output_every = detail::parse_size(value, full, lineno);
    else if (full == "run.output_path")
      cfg.output_path = value;
    else if (full == "run.error_constant")
      cfg.error_constant = detail::parse_double(value, full, lineno);
    else
      throw ConfigError("line " + std::to_string(lineno) + ": unknown field '" +
                        full + "'");
  }
  cfg.validate();
  return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return parse_config(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

/// Grid, topography, layers, and initial state built from a config.
struct Scenario {
  Grid1D grid;
  Topography topo;
  LayerPartition layers;
  FlowState state;
  bool flat_bottom = false;
};

inline Scenario build_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  Grid1D grid = Grid1D::uniform(cfg.cells, cfg.x_min, cfg.x_max, cfg.boundary);
  LayerPartition layers = cfg.fractions.empty()
                              ? LayerPartition::uniform(cfg.layer_count)
                              : LayerPartition(cfg.fractions);

  std::vector<double> zb(cfg.cells, cfg.topo_level);
  if (cfg.topo_type == "gaussian_bump")
    for (std::size_t i = 0; i < cfg.cells; ++i) {
      double r = (grid.center(i) - cfg.bump_center) / cfg.bump_width;
      zb[i] += cfg.bump_amplitude * std::exp(-r * r);
    }
  Topography topo(zb);

  std::vector<double> h(cfg.cells, 0.0);
  std::vector<double> q(cfg.layer_count * cfg.cells, 0.0);
  if (cfg.initial_type == "lake_at_rest") {
    for (std::size_t i = 0; i < cfg.cells; ++i)
      h[i] = std::max(cfg.surface_level - topo[i], 0.0);
  } else if (cfg.initial_type == "dam_break") {
    for (std::size_t i = 0; i < cfg.cells; ++i) {
      double eta = grid.center(i) < cfg.split ? cfg.eta_left : cfg.eta_right;
      h[i] = std::max(eta - topo[i], 0.0);
    }
  } else {  // shear: flat surface with prescribed per-layer velocities
    for (std::size_t i = 0; i < cfg.cells; ++i)
      h[i] = std::max(cfg.surface_level - topo[i], 0.0);
    for (std::size_t a = 0; a < cfg.layer_count; ++a) {
      double u = a < cfg.layer_velocities.size() ? cfg.layer_velocities[a] : 0.0;
      for (std::size_t i = 0; i < cfg.cells; ++i)
        q[a * cfg.cells + i] = layers.fraction(a) * h[i] * u;
    }
  }

  FlowState state(cfg.layer_count, std::move(h), std::move(q));
  bool flat = cfg.topo_type == "flat";
  return Scenario{std::move(grid), std::move(topo), std::move(layers),
                  std::move(state), flat};
}

/// Canonical key = value echo of a config; prefixed line by line into the
/// data files so every output names the run that produced it.
inline std::vector<std::string> describe_config(const ScenarioConfig& cfg) {
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::vector<std::string> out;
  out.push_back("grid.cells = " + std::to_string(cfg.cells));
  out.push_back("grid.x_min = " + num(cfg.x_min));
  out.push_back("grid.x_max = " + num(cfg.x_max));
  out.push_back(std::string("grid.boundary = ") +
                (cfg.boundary == Boundary::periodic ? "periodic" : "reflective"));
  out.push_back("layers.count = " + std::to_string(cfg.layer_count));
  if (cfg.fractions.empty()) {
    out.push_back("layers.fractions = uniform");
  } else {
    std::string s = "layers.fractions =";
    for (double f : cfg.fractions) s += " " + num(f);
    out.push_back(s);
  }
  out.push_back("physics.g = " + num(cfg.params.g));
  out.push_back("physics.mu = " + num(cfg.params.mu));
  out.push_back("physics.k_l = " + num(cfg.params.k_l));
  out.push_back("physics.k_t = " + num(cfg.params.k_t));
  out.push_back("physics.cfl_safety = " + num(cfg.params.cfl_safety));
  out.push_back("physics.dry_tol = " + num(cfg.params.dry_tol));
  out.push_back("physics.dt_max = " + num(cfg.params.dt_max));
  out.push_back(std::string("physics.viscous_mode = ") +
                (cfg.viscous_mode == ViscousMode::as_written
                     ? "as_written"
                     : "vertical_implicit"));
  out.push_back("topography.type = " + cfg.topo_type);
  out.push_back("topography.level = " + num(cfg.topo_level));
  if (cfg.topo_type == "gaussian_bump") {
    out.push_back("topography.amplitude = " + num(cfg.bump_amplitude));
    out.push_back("topography.width = " + num(cfg.bump_width));
    out.push_back("topography.center = " + num(cfg.bump_center));
  }
  out.push_back("initial.type = " + cfg.initial_type);
  if (cfg.initial_type == "dam_break") {
    out.push_back("initial.eta_left = " + num(cfg.eta_left));
    out.push_back("initial.eta_right = " + num(cfg.eta_right));
    out.push_back("initial.split = " + num(cfg.split));
  } else {
    out.push_back("initial.surface_level = " + num(cfg.surface_level));
  }
  if (cfg.initial_type == "shear" && !cfg.layer_velocities.empty()) {
    std::string s = "initial.velocities =";
    for (double v : cfg.layer_velocities) s += " " + num(v);
    out.push_back(s);
  }
  out.push_back("run.end_time = " + num(cfg.end_time));
  out.push_back("run.output_every = " + std::to_string(cfg.output_every));
  out.push_back("run.output_path = " + cfg.output_path);
  out.push_back("run.error_constant = " + num(cfg.error_constant));
  return out;
}

}  // namespace mlswe

#endif  // MLSWE_CONFIG_HPP
