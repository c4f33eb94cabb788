// Experiment runner: evolves the configured problem, drives refinement
// studies, and probes stability thresholds. See README.md for the config and
// CSV formats.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>

#include "chfem/errors.hpp"
#include "chfem/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInstability = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spline Galerkin solver suite for the reduced Camassa-Holm equation"};
  app.require_subcommand(1);

  std::string config_file, out_dir;
  int levels = 0;
  bool quiet = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_file, "experiment config file")->required();
    cmd->add_option("--out", out_dir, "output directory (overrides the config)");
    cmd->add_flag("--quiet", quiet, "suppress progress output");
  };
  CLI::App* cmd_run = app.add_subcommand("run", "evolve one configuration, write CSV diagnostics");
  add_common(cmd_run);
  CLI::App* cmd_conv = app.add_subcommand("converge", "refinement study with error rates");
  add_common(cmd_conv);
  cmd_conv->add_option("--levels", levels, "use only the first k refinement levels");
  CLI::App* cmd_stab = app.add_subcommand("stability", "probe the maximum stable courant number");
  add_common(cmd_stab);

  CLI11_PARSE(app, argc, argv);

  try {
    chfem::ExperimentConfig cfg = chfem::load_config(config_file);
    if (!out_dir.empty()) cfg.out_dir = out_dir;

    if (cmd_run->parsed()) {
      cfg.subcommand = "run";
      const chfem::RunResult res = chfem::run_experiment(cfg);
      if (res.status == chfem::RunStatus::instability) {
        if (!quiet)
          std::fprintf(stderr, "instability abort at step %d (t = %.6g); outputs in %s\n",
                       res.abort_step, res.abort_time, cfg.out_dir.c_str());
        return kExitInstability;
      }
      if (!quiet) std::printf("run complete; outputs in %s\n", cfg.out_dir.c_str());
      return kExitOk;
    }
    if (cmd_conv->parsed()) {
      cfg.subcommand = "converge";
      const chfem::ConvergeResult res = chfem::converge_experiment(cfg, levels);
      if (!quiet) {
        std::printf("N,u_l2,u_l2_rate\n");
        for (size_t i = 0; i < res.levels.size(); ++i)
          std::printf("%d,%.4e,%s\n", res.levels[i].N, res.levels[i].u_l2,
                      res.u_l2_rate[i] ? std::to_string(*res.u_l2_rate[i]).c_str() : "-");
        std::printf("rates written to %s/rates.csv\n", cfg.out_dir.c_str());
      }
      return kExitOk;
    }
    cfg.subcommand = "stability";
    const chfem::StabilityResult res = chfem::stability_experiment(cfg);
    if (!quiet) std::printf("max stable courant: %.3f\n", res.max_courant);
    return kExitOk;
  } catch (const chfem::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
