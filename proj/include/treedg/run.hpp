#ifndef TREEDG_RUN_HPP
#define TREEDG_RUN_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "treedg/config.hpp"
#include "treedg/output.hpp"
#include "treedg/semi.hpp"
#include "treedg/timeint.hpp"

namespace treedg {

// Calls fn with the equation object selected by the config; all downstream
// code is templated on the equation type.
template <class Fn>
decltype(auto) dispatch_equation(const RunConfig& cfg, Fn&& fn) {
  if (cfg.kind == "linear_advection_1d")
    return fn(LinearAdvection<1>{{cfg.advection_velocity[0]}});
  if (cfg.kind == "linear_advection_2d")
    return fn(LinearAdvection<2>{{cfg.advection_velocity[0], cfg.advection_velocity[1]}});
  if (cfg.kind == "burgers_1d") return fn(Burgers1D{});
  if (cfg.kind == "euler_1d") return fn(CompressibleEuler<1>{cfg.gamma});
  if (cfg.kind == "euler_2d") return fn(CompressibleEuler<2>{cfg.gamma});
  throw ConfigError("unknown equation kind '" + cfg.kind + "'");
}

inline FluxKind flux_kind_from_name(const std::string& name) {
  if (name == "central") return FluxKind::central;
  if (name == "lax_friedrichs") return FluxKind::lax_friedrichs;
  if (name == "hll") return FluxKind::hll;
  if (name == "ec") return FluxKind::ec;
  throw ConfigError("unknown flux '" + name + "'");
}

inline SolverConfig solver_from_config(const RunConfig& cfg) {
  SolverConfig s;
  s.polydeg = cfg.polydeg;
  s.surface_flux = flux_kind_from_name(cfg.surface_flux);
  if (cfg.volume_integral == "weak_form") s.volume_integral = VolumeIntegralKind::weak_form;
  else if (cfg.volume_integral == "flux_differencing")
    s.volume_integral = VolumeIntegralKind::flux_differencing;
  else s.volume_integral = VolumeIntegralKind::shock_capturing;
  s.volume_flux = flux_kind_from_name(cfg.volume_flux);
  s.fv_flux = flux_kind_from_name(cfg.fv_flux);
  s.alpha_max = cfg.alpha_max;
  return s;
}

template <int Dim>
TreeMesh<Dim> mesh_from_config(const RunConfig& cfg) {
  std::array<double, Dim> lo, hi;
  std::array<bool, Dim> per;
  for (int a = 0; a < Dim; ++a) {
    lo[a] = cfg.coordinates_min[a];
    hi[a] = cfg.coordinates_max[a];
    per[a] = cfg.periodicity[a];
  }
  return TreeMesh<Dim>(lo, hi, cfg.initial_refinement_level, cfg.n_cells_max, per);
}

template <class Eq>
Semidiscretization<Eq> semi_from_config(const Eq& eq, const RunConfig& cfg, int n_threads = 1) {
  return Semidiscretization<Eq>(eq, mesh_from_config<Eq::ndims>(cfg),
                                make_problem(cfg.initial_condition, eq), solver_from_config(cfg),
                                n_threads);
}

template <class Eq>
CallbackSet<Eq> callbacks_from_config(const RunConfig& cfg) {
  CallbackSet<Eq> cb;
  cb.positivity.enabled = cfg.positivity;
  cb.positivity.rho_min = cfg.positivity_rho_min;
  cb.positivity.p_min = cfg.positivity_p_min;
  cb.amr.interval = cfg.amr_interval;
  cb.amr.min_level = cfg.amr_min_level;
  cb.amr.max_level = cfg.amr_max_level;
  cb.amr.refine_threshold = cfg.amr_refine_threshold;
  cb.amr.coarsen_threshold = cfg.amr_coarsen_threshold;
  cb.analysis_interval = cfg.analysis_interval;
  cb.save_interval = cfg.save_interval;
  cb.alive_interval = cfg.alive_interval;
  return cb;
}

struct RunSummary {
  RunStats stats;
  AnalysisReport final_report;
};

// `treedg run`: build the semidiscretization, integrate with the configured
// callbacks, and write the analysis series plus final-state exports.
inline RunSummary cmd_run(const RunConfig& cfg, int n_threads = 1, bool quiet = false) {
  return dispatch_equation(cfg, [&](auto eq) -> RunSummary {
    using Eq = decltype(eq);
    auto semi = semi_from_config(eq, cfg, n_threads);
    StateArray u0 = semi.interpolate_initial_condition(0.0);

    const std::string config_text = cfg.render();
    std::filesystem::create_directories(cfg.directory);

    AnalysisCsvWriter analysis_csv;
    auto cb = callbacks_from_config<Eq>(cfg);
    if (cfg.analysis_interval > 0) {
      std::vector<std::string> names;
      for (const char* n : Eq::variable_names()) names.emplace_back(n);
      analysis_csv.open(cfg.directory + "/analysis.csv", config_text, names,
                        semi.problem().has_exact_solution);
      cb.analysis_sink = [&](const Semidiscretization<Eq>& s, const StateArray& u,
                             const RunStats& stats) {
        const AnalysisReport rep = s.analyze(u, stats.final_time);
        analysis_csv.write_row(rep, stats.last_dt, stats.steps);
        if (!quiet)
          std::printf("  analysis: step %ld t=%.6g entropy=%.8g\n", stats.steps, stats.final_time,
                      rep.total_entropy);
      };
    }
    if (cfg.save_interval > 0) {
      cb.save_sink = [&](const Semidiscretization<Eq>& s, const StateArray& u, double t,
                         long step) {
        char name[64];
        std::snprintf(name, sizeof(name), "/state_%06ld.tdgs", step);
        save_state(s, u, t, config_text, cfg.directory + name);
      };
    }

    RunSummary summary;
    StateArray u_final;
    summary.stats = integrate(semi, std::move(u0), {0.0, cfg.t_end}, cfg.cfl, std::move(cb),
                              &u_final);
    summary.final_report = semi.analyze(u_final, summary.stats.final_time);

    save_state(semi, u_final, summary.stats.final_time, config_text,
               cfg.directory + "/final.tdgs");
    for (const auto& format : cfg.formats) {
      if (format == "vtk") write_vtk(semi, u_final, config_text, cfg.directory + "/final.vtk");
      if (format == "csv") write_node_csv(semi, u_final, config_text, cfg.directory + "/final.csv");
      if (format == "ppm")
        write_ppm(semi, u_final, config_text, cfg.ppm_variable, cfg.ppm_resolution,
                  cfg.directory + "/final.ppm");
    }

    if (!quiet) {
      std::printf("run finished: %ld steps, %ld rhs evaluations, %.3f s wall, %d elements\n",
                  summary.stats.steps, summary.stats.rhs_evaluations, summary.stats.wall_seconds,
                  semi.n_elements());
      if (!summary.final_report.l2_error.empty()) {
        std::printf("final errors vs exact solution:\n");
        const auto names = Eq::variable_names();
        for (int v = 0; v < Eq::nvars; ++v)
          std::printf("  %-8s l2 = %-14.6e linf = %-14.6e\n", names[v],
                      summary.final_report.l2_error[v], summary.final_report.linf_error[v]);
      }
    }
    return summary;
  });
}

// --- convergence study -----------------------------------------------------------

struct ConvergenceRow {
  int level = 0;
  int n_elements = 0;
  std::vector<double> l2, linf;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  std::vector<double> mean_eoc_l2; // per variable
  double mean_eoc = 0.0;           // averaged over variables
};

// `treedg convergence`: run the same setup over a list of refinement levels
// and tabulate errors with experimental orders log2(e_l / e_{l+1}).
inline ConvergenceTable cmd_convergence(const RunConfig& base, const std::vector<int>& levels,
                                        int n_threads = 1, bool quiet = false) {
  if (levels.empty()) throw ConfigError("convergence needs at least one level");
  return dispatch_equation(base, [&](auto eq) -> ConvergenceTable {
    using Eq = decltype(eq);
    ConvergenceTable table;
    for (int level : levels) {
      RunConfig cfg = base;
      cfg.initial_refinement_level = level;
      cfg.analysis_interval = 0;
      cfg.save_interval = 0;
      cfg.alive_interval = 0;
      cfg.formats.clear();
      auto semi = semi_from_config(eq, cfg, n_threads);
      if (!semi.problem().has_exact_solution)
        throw ConfigError("initial condition '" + cfg.initial_condition +
                          "' has no exact solution; convergence study impossible");
      StateArray u_final;
      auto cb = callbacks_from_config<Eq>(cfg);
      const RunStats stats = integrate(semi, semi.interpolate_initial_condition(0.0),
                                       {0.0, cfg.t_end}, cfg.cfl, std::move(cb), &u_final);
      ConvergenceRow row;
      row.level = level;
      row.n_elements = semi.n_elements();
      semi.compute_errors(u_final, stats.final_time, semi.problem().evaluate, row.l2, row.linf);
      table.rows.push_back(std::move(row));
    }

    table.mean_eoc_l2.assign(Eq::nvars, 0.0);
    if (table.rows.size() >= 2) {
      for (int v = 0; v < Eq::nvars; ++v) {
        double acc = 0.0;
        for (size_t r = 0; r + 1 < table.rows.size(); ++r)
          acc += std::log2(table.rows[r].l2[v] / table.rows[r + 1].l2[v]);
        table.mean_eoc_l2[v] = acc / static_cast<double>(table.rows.size() - 1);
      }
      for (double e : table.mean_eoc_l2) table.mean_eoc += e;
      table.mean_eoc /= static_cast<double>(Eq::nvars);
    }

    if (!quiet) {
      const auto names = Eq::variable_names();
      for (int v = 0; v < Eq::nvars; ++v) {
        std::printf("variable %s\n", names[v]);
        std::printf("  %-6s %-10s %-14s %-8s %-14s\n", "level", "elements", "l2", "eoc", "linf");
        for (size_t r = 0; r < table.rows.size(); ++r) {
          const auto& row = table.rows[r];
          if (r == 0)
            std::printf("  %-6d %-10d %-14.6e %-8s %-14.6e\n", row.level, row.n_elements,
                        row.l2[v], "-", row.linf[v]);
          else
            std::printf("  %-6d %-10d %-14.6e %-8.3f %-14.6e\n", row.level, row.n_elements,
                        row.l2[v], std::log2(table.rows[r - 1].l2[v] / row.l2[v]), row.linf[v]);
        }
      }
      std::printf("mean EOC (l2): %.3f\n", table.mean_eoc);
    }

    std::filesystem::create_directories(base.directory);
    std::ofstream csv(base.directory + "/convergence.csv");
    if (csv) {
      csv << "level,n_elements";
      const auto names = Eq::variable_names();
      for (int v = 0; v < Eq::nvars; ++v) csv << ",l2_" << names[v] << ",linf_" << names[v];
      csv << "\n";
      for (const auto& row : table.rows) {
        csv << row.level << "," << row.n_elements;
        for (int v = 0; v < Eq::nvars; ++v)
          csv << "," << output_detail::fmt(row.l2[v]) << "," << output_detail::fmt(row.linf[v]);
        csv << "\n";
      }
    }
    return table;
  });
}

// --- PID benchmark ------------------------------------------------------------------

// Timing inputs and the performance index
//   PID = wall-clock / (#steps * 5 * #elements * (polydeg+1)^d),
// the time to advance one degree of freedom by one RK stage. Repeats follow
// the smallest-of-five protocol.
struct BenchReport {
  std::vector<double> wall_seconds; // one per repeat
  long n_time_steps = 0;
  int n_elements = 0;
  int polydeg = 0;
  int ndims = 0;
  double min_wall_seconds = 0.0;
  double pid_seconds = 0.0;

  double recompute_pid() const {
    double dofs = n_elements;
    for (int a = 0; a < ndims; ++a) dofs *= (polydeg + 1);
    return min_wall_seconds / (static_cast<double>(n_time_steps) * 5.0 * dofs);
  }
};

// `treedg bench`: integrate with every callback except step sizing disabled,
// timing the pure rhs+RK loop.
inline BenchReport cmd_bench(const RunConfig& base, int repeats = 5, int n_threads = 1,
                             bool quiet = false) {
  if (repeats < 1) throw ConfigError("bench needs repeats >= 1");
  return dispatch_equation(base, [&](auto eq) -> BenchReport {
    using Eq = decltype(eq);
    RunConfig cfg = base;
    cfg.analysis_interval = 0;
    cfg.save_interval = 0;
    cfg.alive_interval = 0;
    cfg.amr_interval = 0;
    cfg.positivity = false;
    cfg.formats.clear();

    BenchReport report;
    report.polydeg = cfg.polydeg;
    report.ndims = Eq::ndims;
    for (int r = 0; r < repeats; ++r) {
      auto semi = semi_from_config(eq, cfg, n_threads);
      StateArray u_final;
      const RunStats stats = integrate(semi, semi.interpolate_initial_condition(0.0),
                                       {0.0, cfg.t_end}, cfg.cfl, CallbackSet<Eq>{}, &u_final);
      report.wall_seconds.push_back(stats.wall_seconds);
      report.n_time_steps = stats.steps;
      report.n_elements = semi.n_elements();
    }
    report.min_wall_seconds =
        *std::min_element(report.wall_seconds.begin(), report.wall_seconds.end());
    report.pid_seconds = report.recompute_pid();

    std::filesystem::create_directories(base.directory);
    std::ofstream csv(base.directory + "/bench.csv");
    if (csv) {
      csv << "kind,polydeg,ndims,n_elements,n_time_steps,repeats,min_wall_seconds,pid_seconds";
      for (size_t r = 0; r < report.wall_seconds.size(); ++r) csv << ",wall_" << r;
      csv << "\n";
      csv << cfg.kind << "," << report.polydeg << "," << report.ndims << "," << report.n_elements
          << "," << report.n_time_steps << "," << repeats << ","
          << output_detail::fmt(report.min_wall_seconds) << ","
          << output_detail::fmt(report.pid_seconds);
      for (double w : report.wall_seconds) csv << "," << output_detail::fmt(w);
      csv << "\n";
    }

    if (!quiet) {
      std::printf("bench: %d repeats, %ld steps, %d elements, polydeg %d\n", repeats,
                  report.n_time_steps, report.n_elements, report.polydeg);
      for (size_t r = 0; r < report.wall_seconds.size(); ++r)
        std::printf("  repeat %zu: %.6f s\n", r, report.wall_seconds[r]);
      std::printf("  min wall: %.6f s  PID: %.6e s\n", report.min_wall_seconds,
                  report.pid_seconds);
    }
    return report;
  });
}

// `treedg export`: regenerate viewer artifacts from a saved state file using
// its embedded configuration.
inline void cmd_export(const std::string& state_path, const std::vector<std::string>& formats,
                       const std::string& out_dir) {
  const std::string config_text = read_state_config(state_path);
  RunConfig cfg = parse_config_text(config_text, state_path + ":embedded-config");
  dispatch_equation(cfg, [&](auto eq) {
    using Eq = decltype(eq);
    auto loaded = load_state<Eq>(state_path);
    Semidiscretization<Eq> semi(eq, std::move(loaded.mesh),
                                make_problem(cfg.initial_condition, eq), solver_from_config(cfg));
    std::filesystem::create_directories(out_dir);
    const std::string stem =
        out_dir + "/" + std::filesystem::path(state_path).stem().string();
    for (const auto& format : formats) {
      if (format == "vtk") write_vtk(semi, loaded.u, config_text, stem + ".vtk");
      else if (format == "csv") write_node_csv(semi, loaded.u, config_text, stem + ".csv");
      else if (format == "ppm")
        write_ppm(semi, loaded.u, config_text, cfg.ppm_variable, cfg.ppm_resolution,
                  stem + ".ppm");
      else
        throw ConfigError("unknown export format '" + format + "' (allowed: vtk, csv, ppm)");
    }
  });
}

} // namespace treedg

#endif
