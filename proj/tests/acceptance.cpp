// Acceptance suite: one pass/fail line per criterion. Each criterion runs a
// self-contained experiment at its pinned tolerance; the binary exits with
// the number of failed criteria. An optional argument selects one criterion.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "treedg/treedg.hpp"

using namespace treedg;

namespace {

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  }
  void note(const std::string& s) {
    detail << (detail.str().empty() ? "" : "; ") << s;
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::mt19937& rng() {
  static std::mt19937 gen(987654321);
  return gen;
}

CompressibleEuler2D::State random_euler2(const CompressibleEuler2D& eq) {
  std::uniform_real_distribution<double> rho(0.1, 10.0), v(-5.0, 5.0), p(0.01, 10.0);
  return eq.prim2cons({rho(rng()), v(rng()), v(rng()), p(rng())});
}

// ---------------------------------------------------------------------------
// 1. SBP/basis suite
// ---------------------------------------------------------------------------
Check criterion_1() {
  Check c;
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  double worst_sbp = 0.0, worst_w = 0.0, worst_d = 0.0;
  for (int N = 1; N <= 10; ++N) {
    LglBasis b(N);
    const int n = N + 1;
    double wsum = 0.0;
    for (double w : b.weights()) wsum += w;
    worst_w = std::max(worst_w, std::abs(wsum - 2.0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double expected = 0.0;
        if (i == j && i == 0) expected = -1.0;
        if (i == j && i == n - 1) expected = 1.0;
        const double q = b.weights()[i] * b.deriv()(i, j) + b.weights()[j] * b.deriv()(j, i);
        worst_sbp = std::max(worst_sbp, std::abs(q - expected));
      }
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> coeff(N + 1);
      for (auto& x : coeff) x = dist(rng());
      for (int i = 0; i < n; ++i) {
        // p and p' at node i by Horner
        double p = 0.0, dp = 0.0;
        for (int k = N; k >= 0; --k) {
          dp = dp * b.nodes()[i] + p;
          p = p * b.nodes()[i] + coeff[k];
        }
        double d_num = 0.0;
        for (int j = 0; j < n; ++j) {
          double pj = 0.0;
          for (int k = N; k >= 0; --k) pj = pj * b.nodes()[j] + coeff[k];
          d_num += b.deriv()(i, j) * pj;
        }
        worst_d = std::max(worst_d, std::abs(d_num - dp));
      }
    }
  }
  c.require(worst_sbp <= 1e-14, "SBP residual " + fmt(worst_sbp) + " > 1e-14");
  c.require(worst_w <= 1e-14, "weight sum residual " + fmt(worst_w) + " > 1e-14");
  c.require(worst_d <= 1e-12, "derivative residual " + fmt(worst_d) + " > 1e-12");
  c.note("max |Q+Q^T-B| = " + fmt(worst_sbp) + ", |sum(w)-2| = " + fmt(worst_w) +
         ", |D p - p'| = " + fmt(worst_d));
  return c;
}

// ---------------------------------------------------------------------------
// 2. flux property suite
// ---------------------------------------------------------------------------
template <class Eq, class Gen>
void flux_properties(Check& c, const Eq& eq, Gen gen, const std::string& label) {
  double worst_cons = 0.0, worst_tadmor = 0.0, worst_w = 0.0;
  bool symmetric = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = gen();
    const auto b = gen();
    for (int axis = 0; axis < Eq::ndims; ++axis) {
      const auto f_aa = flux_ec(eq, a, a, axis);
      const auto f_exact = eq.physical_flux(a, axis);
      for (int v = 0; v < Eq::nvars; ++v)
        worst_cons = std::max(worst_cons, std::abs(f_aa[v] - f_exact[v]) /
                                              (1.0 + std::abs(f_exact[v])));
      const auto f_ab = flux_ec(eq, a, b, axis);
      const auto f_ba = flux_ec(eq, b, a, axis);
      for (int v = 0; v < Eq::nvars; ++v) symmetric = symmetric && (f_ab[v] == f_ba[v]);
      const auto ea = eq.cons2entropy(a);
      const auto eb = eq.cons2entropy(b);
      double jump = 0.0;
      for (int v = 0; v < Eq::nvars; ++v) jump += (eb.w[v] - ea.w[v]) * f_ab[v];
      worst_tadmor = std::max(worst_tadmor,
                              std::abs(jump - (eb.psi[axis] - ea.psi[axis])) /
                                  (1.0 + std::abs(eb.psi[axis]) + std::abs(ea.psi[axis])));
    }
    // entropy variables vs finite differences of S
    const double h = 1e-6;
    const auto ea = eq.cons2entropy(a);
    for (int v = 0; v < Eq::nvars; ++v) {
      auto up = a, um = a;
      up[v] += h;
      um[v] -= h;
      const double fd = (eq.cons2entropy(up).entropy - eq.cons2entropy(um).entropy) / (2.0 * h);
      worst_w = std::max(worst_w, std::abs(fd - ea.w[v]) / (1.0 + std::abs(ea.w[v])));
    }
  }
  c.require(worst_cons <= 1e-12, label + " consistency " + fmt(worst_cons) + " > 1e-12");
  c.require(symmetric, label + " EC flux not bit-symmetric");
  c.require(worst_tadmor <= 1e-12, label + " Tadmor " + fmt(worst_tadmor) + " > 1e-12");
  c.require(worst_w <= 1e-5, label + " entropy-variable FD " + fmt(worst_w) + " > 1e-5");
}

Check criterion_2() {
  Check c;
  std::uniform_real_distribution<double> scalar(-4.0, 4.0);
  std::uniform_real_distribution<double> rho(0.1, 10.0), v(-5.0, 5.0), p(0.01, 10.0);

  LinearAdvection1D adv1{{1.3}};
  flux_properties(c, adv1, [&] { return LinearAdvection1D::State{scalar(rng())}; }, "adv1d");
  LinearAdvection2D adv2{{1.0, -0.7}};
  flux_properties(c, adv2, [&] { return LinearAdvection2D::State{scalar(rng())}; }, "adv2d");
  Burgers1D burgers;
  flux_properties(c, burgers, [&] { return Burgers1D::State{scalar(rng())}; }, "burgers");
  CompressibleEuler1D euler1{1.4};
  flux_properties(c, euler1,
                  [&] { return euler1.prim2cons({rho(rng()), v(rng()), p(rng())}); }, "euler1d");
  CompressibleEuler2D euler2{1.4};
  flux_properties(c, euler2, [&] { return random_euler2(euler2); }, "euler2d");
  if (c.pass) c.note("5 equation sets x 1000 pairs");
  return c;
}

// ---------------------------------------------------------------------------
// 3. weak form / flux differencing equivalence on a mortar mesh
// ---------------------------------------------------------------------------
Semidiscretization<CompressibleEuler2D> euler_semi(int level, const SolverConfig& solver,
                                                   bool refine_one, const std::string& ic) {
  CompressibleEuler2D eq{1.4};
  TreeMesh<2> mesh({-1.0, -1.0}, {1.0, 1.0}, level, 100000, {true, true});
  if (refine_one) mesh.refine_cells({mesh.leaf_ids()[1]});
  return Semidiscretization<CompressibleEuler2D>(eq, std::move(mesh), make_problem(ic, eq),
                                                 solver);
}

Check criterion_3() {
  Check c;
  SolverConfig weak;
  weak.polydeg = 3;
  weak.surface_flux = FluxKind::lax_friedrichs;
  weak.volume_integral = VolumeIntegralKind::weak_form;
  SolverConfig fd = weak;
  fd.volume_integral = VolumeIntegralKind::flux_differencing;
  fd.volume_flux = FluxKind::central;
  auto semi_weak = euler_semi(2, weak, true, "constant");
  auto semi_fd = euler_semi(2, fd, true, "constant");
  c.require(!semi_weak.interfaces().mortars.empty(), "mesh has no mortar");

  StateArray u(4, semi_weak.n_nodes_per_element(), semi_weak.n_elements());
  StateArray du1 = u, du2 = u;
  double worst = 0.0;
  // moderate nodal variation keeps the mortar face projections admissible
  std::uniform_real_distribution<double> rho(0.5, 2.0), v(-1.0, 1.0), p(0.5, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    for (int e = 0; e < u.n_elements(); ++e)
      for (int node = 0; node < u.n_nodes_per_element(); ++node)
        u.set<4>(e, node,
                 semi_weak.equations().prim2cons({rho(rng()), v(rng()), v(rng()), p(rng())}));
    semi_weak.rhs(u, 0.0, du1);
    semi_fd.rhs(u, 0.0, du2);
    double scale = 0.0;
    for (double x : du1.raw()) scale = std::max(scale, std::abs(x));
    for (size_t i = 0; i < du1.raw().size(); ++i)
      worst = std::max(worst, std::abs(du1.raw()[i] - du2.raw()[i]) / (1.0 + scale));
  }
  c.require(worst <= 1e-12, "relative deviation " + fmt(worst) + " > 1e-12");
  c.note("max relative deviation " + fmt(worst) + " over 100 states");
  return c;
}

// ---------------------------------------------------------------------------
// 4. free-stream preservation with shock capturing on an AMR mesh
// ---------------------------------------------------------------------------
Check criterion_4() {
  Check c;
  CompressibleEuler2D eq{1.4};
  TreeMesh<2> mesh({-1.0, -1.0}, {1.0, 1.0}, 2, 100000, {true, true});
  mesh.refine_cells({mesh.leaf_ids()[1]}); // two levels of cells with mortars
  SolverConfig solver;
  solver.polydeg = 3;
  solver.volume_integral = VolumeIntegralKind::shock_capturing;
  solver.volume_flux = FluxKind::ec;
  solver.surface_flux = FluxKind::lax_friedrichs;
  auto problem = make_problem("constant", eq);
  problem.evaluate = [eq](const std::array<double, 2>&, double) {
    return eq.prim2cons({1.0, 0.1, -0.2, 1.0});
  };
  Semidiscretization<CompressibleEuler2D> semi(eq, std::move(mesh), problem, solver);
  StateArray u = semi.interpolate_initial_condition(0.0);
  StateArray du = u;
  semi.rhs(u, 0.0, du);
  double dmax = 0.0;
  for (double x : du.raw()) dmax = std::max(dmax, std::abs(x));
  c.require(dmax <= 1e-13, "||rhs||_inf = " + fmt(dmax) + " > 1e-13");
  c.note("||rhs||_inf = " + fmt(dmax));
  return c;
}

// ---------------------------------------------------------------------------
// 5. conservation across a run with AMR
// ---------------------------------------------------------------------------
Check criterion_5() {
  Check c;
  SolverConfig solver;
  solver.polydeg = 3;
  solver.surface_flux = FluxKind::lax_friedrichs;
  solver.volume_integral = VolumeIntegralKind::flux_differencing;
  solver.volume_flux = FluxKind::ec;
  auto semi = euler_semi(3, solver, /*refine_one=*/true, "density_wave");
  StateArray u0 = semi.interpolate_initial_condition(0.0);

  std::array<double, 4> before{};
  for (int v = 0; v < 4; ++v) {
    const int vv = v;
    before[v] =
        semi.integrate_quantity(u0, [vv](const CompressibleEuler2D::State& s) { return s[vv]; });
  }

  CallbackSet<CompressibleEuler2D> cb;
  cb.amr.interval = 5;
  cb.amr.min_level = 3;
  cb.amr.max_level = 4;
  StateArray uf;
  const RunStats stats = integrate(semi, std::move(u0), {0.0, 0.5}, 0.5, std::move(cb), &uf);

  double worst = 0.0;
  for (int v = 0; v < 4; ++v) {
    const int vv = v;
    const double after =
        semi.integrate_quantity(uf, [vv](const CompressibleEuler2D::State& s) { return s[vv]; });
    worst = std::max(worst, std::abs(after - before[v]) / (1.0 + std::abs(before[v])));
  }
  c.require(worst <= 1e-11, "conserved-total drift " + fmt(worst) + " > 1e-11");
  c.note(std::to_string(stats.steps) + " steps, drift " + fmt(worst));
  return c;
}

// ---------------------------------------------------------------------------
// 6. semidiscrete entropy balance along a run
// ---------------------------------------------------------------------------
double entropy_production(const Semidiscretization<CompressibleEuler2D>& semi,
                          const StateArray& u, double t, double& scale) {
  StateArray du(4, semi.n_nodes_per_element(), semi.n_elements());
  semi.rhs(u, t, du);
  double total = 0.0;
  scale = 0.0;
  for (int e = 0; e < semi.n_elements(); ++e) {
    const double jac = semi.element_jacobian(e);
    for (int node = 0; node < semi.n_nodes_per_element(); ++node) {
      const auto ent = semi.equations().cons2entropy(u.get<4>(e, node));
      double dot = 0.0;
      for (int v = 0; v < 4; ++v) dot += ent.w[v] * du(e, node, v);
      const double term = semi.node_weights()[node] * jac * dot;
      total += term;
      scale += std::abs(term);
    }
  }
  return total;
}

Check criterion_6() {
  Check c;
  for (const bool ec_surface : {true, false}) {
    SolverConfig solver;
    solver.polydeg = 3;
    solver.surface_flux = ec_surface ? FluxKind::ec : FluxKind::lax_friedrichs;
    solver.volume_integral = VolumeIntegralKind::flux_differencing;
    solver.volume_flux = FluxKind::ec;
    auto semi = euler_semi(3, solver, false, "density_wave");

    CallbackSet<CompressibleEuler2D> cb;
    int samples = 0;
    double worst_abs = 0.0, worst_signed = -1e300;
    cb.post_step_hook = [&](Semidiscretization<CompressibleEuler2D>& s, StateArray& u, double t,
                            long step) {
      if (step % 30 != 0 || samples >= 10) return;
      ++samples;
      double scale = 0.0;
      const double production = entropy_production(s, u, t, scale);
      worst_abs = std::max(worst_abs, std::abs(production) / (1.0 + scale));
      worst_signed = std::max(worst_signed, production / (1.0 + scale));
    };
    StateArray uf;
    integrate(semi, semi.interpolate_initial_condition(0.0), {0.0, 0.5}, 0.5, std::move(cb), &uf);
    if (ec_surface) {
      c.require(samples >= 10, "only " + std::to_string(samples) + " samples");
      c.require(worst_abs <= 1e-12, "EC/EC |entropy production| " + fmt(worst_abs) + " > 1e-12");
      c.note("EC/EC max " + fmt(worst_abs) + " over " + std::to_string(samples) + " samples");
    } else {
      c.require(worst_signed <= 1e-12,
                "LLF surface entropy production " + fmt(worst_signed) + " > +1e-12");
      c.note("LLF max signed " + fmt(worst_signed));
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// 7. experimental order of convergence
// ---------------------------------------------------------------------------
Check criterion_7() {
  Check c;
  RunConfig adv = parse_config_file("configs/advection_1d_convergence.toml");
  adv.directory = "acceptance_out/convergence_advection";
  const ConvergenceTable t1 = cmd_convergence(adv, {2, 3, 4, 5}, 1, true);
  c.require(std::abs(t1.mean_eoc - 4.0) <= 0.5,
            "advection mean EOC " + fmt(t1.mean_eoc) + " outside 4.0 +- 0.5");

  RunConfig euler = parse_config_file("configs/euler_convergence_2d.toml");
  euler.directory = "acceptance_out/convergence_euler";
  const ConvergenceTable t2 = cmd_convergence(euler, {2, 3, 4}, 1, true);
  c.require(t2.mean_eoc >= 3.5, "euler mean EOC " + fmt(t2.mean_eoc) + " < 3.5");
  c.note("advection EOC " + fmt(t1.mean_eoc) + ", euler EOC " + fmt(t2.mean_eoc));
  return c;
}

// ---------------------------------------------------------------------------
// 8. RK order
// ---------------------------------------------------------------------------
Check criterion_8() {
  Check c;
  const Rk54Scheme scheme;
  auto solve = [&](double dt) {
    StateArray u(1, 1, 1), k(1, 1, 1), du(1, 1, 1);
    u(0, 0, 0) = 1.0;
    auto rhs = [](const StateArray& uu, double, StateArray& dd) { dd(0, 0, 0) = -uu(0, 0, 0); };
    const int steps = static_cast<int>(std::round(1.0 / dt));
    for (int s = 0; s < steps; ++s) rk54_step(rhs, scheme, u, k, du, s * dt, dt, s);
    return std::abs(u(0, 0, 0) - std::exp(-1.0));
  };
  const double e1 = solve(0.1), e2 = solve(0.05), e3 = solve(0.025);
  const double order_a = std::log2(e1 / e2), order_b = std::log2(e2 / e3);
  c.require(std::abs(order_a - 4.0) <= 0.1, "order " + fmt(order_a) + " outside 4.0 +- 0.1");
  c.require(std::abs(order_b - 4.0) <= 0.1, "order " + fmt(order_b) + " outside 4.0 +- 0.1");
  c.note("measured orders " + fmt(order_a) + ", " + fmt(order_b));
  return c;
}

// ---------------------------------------------------------------------------
// 9. stability at CFL = 0.5
// ---------------------------------------------------------------------------
// L2 error of the DG polynomial against the exact solution, measured with an
// oversampled Gauss quadrature (2(N+1) points per axis). The nodal L2 norm of
// the initial interpolant is identically zero, so this oracle supplies the
// meaningful "initial interpolation error" baseline.
double oversampled_l2(const Semidiscretization<CompressibleEuler2D>& semi, const StateArray& u,
                      double t) {
  const int n_over = 2 * semi.basis().n_nodes();
  std::vector<double> gx, gw;
  detail::gauss_nodes_weights(n_over, gx, gw);
  std::vector<std::vector<double>> lg(n_over);
  for (int q = 0; q < n_over; ++q) lg[q] = semi.basis().lagrange_at(gx[q]);
  double err2 = 0.0, measure = 0.0;
  const int n = semi.basis().n_nodes();
  for (int e = 0; e < semi.n_elements(); ++e) {
    const double jac = semi.element_jacobian(e);
    const auto& cell = semi.mesh().cell(semi.element_cell_id(e));
    const double half = 0.5 * semi.element_dx(e);
    for (int qj = 0; qj < n_over; ++qj)
      for (int qi = 0; qi < n_over; ++qi) {
        const std::array<double, 2> x{cell.center[0] + half * gx[qi],
                                      cell.center[1] + half * gx[qj]};
        const auto exact = semi.problem().evaluate(x, t);
        std::array<double, 4> num{};
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) {
            const double wij = lg[qi][i] * lg[qj][j];
            for (int v = 0; v < 4; ++v) num[v] += wij * u(e, i + n * j, v);
          }
        const double wq = gw[qi] * gw[qj] * jac;
        measure += wq;
        for (int v = 0; v < 4; ++v) err2 += wq * (num[v] - exact[v]) * (num[v] - exact[v]);
      }
  }
  return std::sqrt(err2 / measure);
}

Check criterion_9() {
  Check c;
  for (int N : {3, 7}) {
    SolverConfig solver;
    solver.polydeg = N;
    solver.surface_flux = FluxKind::hll;
    solver.volume_integral = VolumeIntegralKind::weak_form;
    auto semi = euler_semi(N == 3 ? 3 : 2, solver, false, "density_wave");
    StateArray u0 = semi.interpolate_initial_condition(0.0);
    const double e0 = oversampled_l2(semi, u0, 0.0);
    StateArray uf;
    try {
      const RunStats stats =
          integrate(semi, std::move(u0), {0.0, 1.0}, 0.5, CallbackSet<CompressibleEuler2D>{}, &uf);
      const double ef = oversampled_l2(semi, uf, stats.final_time);
      c.require(ef < 10.0 * e0, "N=" + std::to_string(N) + ": final error " + fmt(ef) +
                                    " >= 10 x interpolation error " + fmt(e0));
      c.note("N=" + std::to_string(N) + " growth factor " + fmt(ef / e0));
    } catch (const DivergenceError& e) {
      c.require(false, "N=" + std::to_string(N) + " diverged: " + std::string(e.what()));
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// 10. positivity limiting on the blast
// ---------------------------------------------------------------------------
Check criterion_10() {
  Check c;
  RunConfig cfg = parse_config_file("configs/blast.toml");
  const double rho_min = cfg.positivity_rho_min, p_min = cfg.positivity_p_min;

  CompressibleEuler2D eq{cfg.gamma};
  auto make_semi = [&]() { return semi_from_config(eq, cfg); };

  {
    auto semi = make_semi();
    CallbackSet<CompressibleEuler2D> cb = callbacks_from_config<CompressibleEuler2D>(cfg);
    cb.analysis_interval = 0;
    cb.alive_interval = 0;
    double min_rho = 1e300, min_p = 1e300;
    cb.post_step_hook = [&](Semidiscretization<CompressibleEuler2D>& s, StateArray& u, double,
                            long) {
      for (int e = 0; e < s.n_elements(); ++e)
        for (int node = 0; node < s.n_nodes_per_element(); ++node) {
          min_rho = std::min(min_rho, u(e, node, 0));
          min_p = std::min(min_p, s.equations().pressure(u.get<4>(e, node)));
        }
    };
    try {
      const RunStats stats = integrate(semi, semi.interpolate_initial_condition(0.0),
                                       {0.0, cfg.t_end}, cfg.cfl, std::move(cb), nullptr);
      // allow one part in 1e6 of roundoff on the exact-threshold scaling
      c.require(min_rho >= rho_min * (1.0 - 1e-6),
                "min rho " + fmt(min_rho) + " below threshold " + fmt(rho_min));
      c.require(min_p >= p_min * (1.0 - 1e-6),
                "min p " + fmt(min_p) + " below threshold " + fmt(p_min));
      c.note("limited run: " + std::to_string(stats.steps) + " steps, min rho " + fmt(min_rho) +
             ", min p " + fmt(min_p));
    } catch (const std::exception& e) {
      c.require(false, std::string("limited run failed: ") + e.what());
    }
  }
  {
    auto semi = make_semi();
    bool diverged = false;
    try {
      integrate(semi, semi.interpolate_initial_condition(0.0), {0.0, cfg.t_end}, cfg.cfl,
                CallbackSet<CompressibleEuler2D>{}, nullptr);
    } catch (const DivergenceError&) {
      diverged = true;
    }
    c.require(diverged, "run without the limiter did not raise a divergence error");
    if (diverged) c.note("unlimited run diverges as required");
  }
  return c;
}

// ---------------------------------------------------------------------------
// 11. PID harness
// ---------------------------------------------------------------------------
Check criterion_11() {
  Check c;
  RunConfig cfg = parse_config_file("configs/bench_euler.toml");
  cfg.directory = "acceptance_out/bench";

  std::array<double, 2> pids{};
  for (int i = 0; i < 2; ++i) {
    cfg.initial_refinement_level = 3 + i; // 64 and 256 elements
    const BenchReport report = cmd_bench(cfg, 5, 1, true);
    c.require(static_cast<int>(report.wall_seconds.size()) == 5, "expected 5 recorded repeats");
    double min_wall = report.wall_seconds[0];
    for (double w : report.wall_seconds) min_wall = std::min(min_wall, w);
    c.require(report.min_wall_seconds == min_wall, "reported minimum is not the repeat minimum");
    const double recomputed = report.recompute_pid();
    c.require(std::abs(report.pid_seconds - recomputed) <= 1e-15 * recomputed,
              "stored PID does not match recomputation");
    c.require(report.n_elements == (i == 0 ? 64 : 256), "unexpected element count");
    pids[i] = report.pid_seconds;
  }
  const double ratio = std::max(pids[0] / pids[1], pids[1] / pids[0]);
  c.require(ratio <= 2.0, "PID ratio across sizes " + fmt(ratio) + " > 2");
  c.note("PID(64) = " + fmt(pids[0]) + " s, PID(256) = " + fmt(pids[1]) + " s, ratio " +
         fmt(ratio));
  return c;
}

// ---------------------------------------------------------------------------
// 12. determinism across runs and thread counts
// ---------------------------------------------------------------------------
Check criterion_12() {
  Check c;
  auto run_once = [&](int threads) {
    SolverConfig solver;
    solver.polydeg = 3;
    solver.surface_flux = FluxKind::ec;
    solver.volume_integral = VolumeIntegralKind::flux_differencing;
    solver.volume_flux = FluxKind::ec;
    auto semi = euler_semi(3, solver, true, "density_wave");
    semi.set_n_threads(threads);
    StateArray uf;
    integrate(semi, semi.interpolate_initial_condition(0.0), {0.0, 0.25}, 0.5,
              CallbackSet<CompressibleEuler2D>{}, &uf);
    return uf.raw();
  };
  const auto a = run_once(1);
  const auto b = run_once(1);
  const auto d = run_once(4);
  c.require(a == b, "two single-threaded runs differ");
  c.require(a == d, "1-thread and 4-thread runs differ");
  c.note("bit-identical at 1 and 4 threads");
  return c;
}

} // namespace

int main(int argc, char** argv) {
  using CriterionFn = Check (*)();
  const std::array<std::pair<const char*, CriterionFn>, 12> criteria = {{
      {"SBP basis suite (N = 1..10)", &criterion_1},
      {"flux property suite (consistency, symmetry, Tadmor, entropy FD)", &criterion_2},
      {"weak form == flux differencing with central flux, mortar mesh", &criterion_3},
      {"free stream with shock capturing on a 2-level AMR mesh", &criterion_4},
      {"conservation over an AMR density-wave run", &criterion_5},
      {"semidiscrete entropy: EC conserved, LLF dissipative", &criterion_6},
      {"convergence orders (advection 1D, Euler 2D manufactured)", &criterion_7},
      {"RK convergence order 4.0 +- 0.1", &criterion_8},
      {"stability at CFL = 0.5 (N = 3 and 7, T = 1)", &criterion_9},
      {"blast positivity: limiter load-bearing", &criterion_10},
      {"PID harness: recomputable, size-stable, repeat-minimum", &criterion_11},
      {"bit-exact determinism at 1 and K threads", &criterion_12},
  }};

  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  int failures = 0;
  for (int i = 1; i <= 12; ++i) {
    if (only != 0 && i != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Check result;
    try {
      result = criteria[i - 1].second();
    } catch (const std::exception& e) {
      result.pass = false;
      result.note(std::string("exception: ") + e.what());
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %2d (%6.2f s): %s%s%s\n", result.pass ? "PASS" : "FAIL", i, wall,
                criteria[i - 1].first, result.detail.str().empty() ? "" : " -- ",
                result.detail.str().c_str());
    std::fflush(stdout);
    if (!result.pass) ++failures;
  }
  return failures;
}
