// Command-line front end: run simulations from declarative configs, drive
// convergence studies and PID benchmarks, and export saved states for
// external viewers.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "treedg/treedg.hpp"

int main(int argc, char** argv) {
  CLI::App app{std::string(treedg::version_string) +
               " - adaptive DG solver for hyperbolic conservation laws"};
  app.require_subcommand(1);

  std::string config_path, out_dir, state_path, format;
  std::vector<int> levels;
  int repeats = 5;
  int threads = 1;

  auto* run = app.add_subcommand("run", "integrate a configuration to its final time");
  run->add_option("config", config_path, "path to a run configuration")->required();
  run->add_option("--out", out_dir, "override the output directory");
  run->add_option("--threads", threads, "worker threads for the spatial operator");

  auto* conv = app.add_subcommand("convergence", "run an experimental-order-of-convergence study");
  conv->add_option("config", config_path, "path to a run configuration")->required();
  conv->add_option("--levels", levels, "refinement levels, e.g. --levels 2,3,4,5")
      ->required()
      ->delimiter(',');
  conv->add_option("--threads", threads, "worker threads for the spatial operator");

  auto* bench = app.add_subcommand("bench", "measure the per-DOF performance index (PID)");
  bench->add_option("config", config_path, "path to a run configuration")->required();
  bench->add_option("--repeats", repeats, "timed repetitions (minimum is reported)");
  bench->add_option("--threads", threads, "worker threads for the spatial operator");

  auto* exp = app.add_subcommand("export", "convert a saved state file to viewer formats");
  exp->add_option("statefile", state_path, "path to a .tdgs state file")->required();
  exp->add_option("--format", format, "vtk, csv, or ppm")->required();
  exp->add_option("--out", out_dir, "output directory (default: alongside the state file)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      treedg::RunConfig cfg = treedg::parse_config_file(config_path);
      if (!out_dir.empty()) cfg.directory = out_dir;
      treedg::cmd_run(cfg, threads);
    } else if (conv->parsed()) {
      treedg::RunConfig cfg = treedg::parse_config_file(config_path);
      treedg::cmd_convergence(cfg, levels, threads);
    } else if (bench->parsed()) {
      treedg::RunConfig cfg = treedg::parse_config_file(config_path);
      treedg::cmd_bench(cfg, repeats, threads);
    } else if (exp->parsed()) {
      std::string dir = out_dir;
      if (dir.empty()) dir = std::filesystem::path(state_path).parent_path().string();
      if (dir.empty()) dir = ".";
      treedg::cmd_export(state_path, {format}, dir);
    }
    return 0;
  } catch (const treedg::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const treedg::DivergenceError& e) {
    std::fprintf(stderr, "divergence error: %s\n", e.what());
    return 3;
  } catch (const treedg::CapacityError& e) {
    std::fprintf(stderr, "capacity error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
