// Command-line front end: run / convergence / audit over a scenario config.

#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mlswe/config.hpp"
#include "mlswe/io.hpp"
#include "mlswe/simulation.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Layer-averaged free-surface flow solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir = ".";
  std::size_t levels = 3;
  unsigned seed = 0;

  CLI::App* run = app.add_subcommand("run", "advance a scenario to end time");
  run->add_option("--config", config_path, "scenario config file")->required();
  run->add_option("--output", output_dir, "output directory");

  CLI::App* conv =
      app.add_subcommand("convergence", "self-convergence study under grid refinement");
  conv->add_option("--config", config_path, "scenario config file")->required();
  conv->add_option("--output", output_dir, "output directory");
  conv->add_option("--levels", levels, "number of refinement levels (>= 2)");

  CLI::App* audit = app.add_subcommand("audit", "invariant battery on a scenario");
  audit->add_option("--config", config_path, "scenario config file")->required();
  audit->add_option("--output", output_dir, "output directory");
  audit->add_option("--seed", seed, "seed for the randomized checks");

  CLI11_PARSE(app, argc, argv);

  try {
    mlswe::ScenarioConfig cfg = mlswe::load_config(config_path);
    if (!output_dir.empty()) cfg.output_path = output_dir;
    std::filesystem::create_directories(cfg.output_path);

    if (run->parsed()) {
      mlswe::RunResult res = mlswe::run_simulation(cfg);
      mlswe::write_run_outputs(cfg.output_path, cfg, res);
      if (!res.ok) {
        std::cerr << "run failed: " << res.failure << "\n";
        return 1;
      }
      std::cout << "run: " << res.steps << " steps to t = "
                << res.final_state.time() << ", output in " << cfg.output_path
                << "\n";
      return 0;
    }
    if (conv->parsed()) {
      std::vector<mlswe::ConvergenceRow> table =
          mlswe::convergence_study(cfg, levels);
      std::ofstream out(cfg.output_path + "/convergence.csv");
      if (!out) throw std::runtime_error("cannot write convergence.csv");
      mlswe::write_convergence_table(out, cfg, table);
      mlswe::write_convergence_table(std::cout, cfg, table);
      return 0;
    }
    // audit
    mlswe::AuditReport rep = mlswe::run_audit(cfg, seed);
    std::ofstream out(cfg.output_path + "/audit.txt");
    if (!out) throw std::runtime_error("cannot write audit.txt");
    mlswe::write_audit_report(out, rep);
    mlswe::write_audit_report(std::cout, rep);
    return rep.all_pass() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
