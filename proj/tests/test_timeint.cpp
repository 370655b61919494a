#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "treedg/semi.hpp"
#include "treedg/timeint.hpp"

using namespace treedg;

namespace {

// scalar ODE harness: u' = lambda * u in a 1x1x1 state array
struct ScalarOde {
  double lambda;
  long calls = 0;
  void operator()(const StateArray& u, double, StateArray& du) {
    ++calls;
    du(0, 0, 0) = lambda * u(0, 0, 0);
  }
};

double rk_solve(double lambda, double u0, double dt, int steps, long* calls = nullptr) {
  StateArray u(1, 1, 1), k(1, 1, 1), du(1, 1, 1);
  u(0, 0, 0) = u0;
  ScalarOde ode{lambda};
  const Rk54Scheme scheme;
  auto rhs = [&ode](const StateArray& uu, double t, StateArray& dd) { ode(uu, t, dd); };
  for (int s = 0; s < steps; ++s) rk54_step(rhs, scheme, u, k, du, s * dt, dt, s);
  if (calls) *calls = ode.calls;
  return u(0, 0, 0);
}

Semidiscretization<LinearAdvection1D> advection_semi(int level, int polydeg,
                                                     const std::string& ic = "convergence_test") {
  LinearAdvection1D eq{{1.0}};
  TreeMesh<1> mesh({-1.0}, {1.0}, level, 100000, {true});
  SolverConfig solver;
  solver.polydeg = polydeg;
  return Semidiscretization<LinearAdvection1D>(eq, std::move(mesh), make_problem(ic, eq), solver);
}

} // namespace

TEST_CASE("rk54: zero rhs leaves the state bit-identical") {
  REQUIRE(rk_solve(0.0, 1.2345678901234567, 0.1, 50) == 1.2345678901234567);
}

TEST_CASE("rk54: one step of u' = -u matches exp to the order-4 truncation bound") {
  const double u1 = rk_solve(-1.0, 1.0, 0.1, 1);
  REQUIRE(std::abs(u1 - std::exp(-0.1)) <= 1e-7);
}

TEST_CASE("rk54: exactly five rhs evaluations per step") {
  long calls = 0;
  rk_solve(-1.0, 1.0, 0.05, 7, &calls);
  REQUIRE(calls == 7 * 5);
}

TEST_CASE("rk54: measured convergence order is 4") {
  // property pinning the coefficient set: global error at T = 1 for u' = -u
  std::vector<double> dts = {0.1, 0.05, 0.025};
  std::vector<double> errors;
  for (double dt : dts) {
    const int steps = static_cast<int>(std::round(1.0 / dt));
    errors.push_back(std::abs(rk_solve(-1.0, 1.0, dt, steps) - std::exp(-1.0)));
  }
  for (size_t i = 0; i + 1 < errors.size(); ++i) {
    const double order = std::log2(errors[i] / errors[i + 1]);
    REQUIRE(order == Catch::Approx(4.0).margin(0.1));
  }
}

TEST_CASE("rk54 raises a divergence error when the rhs produces non-finite values") {
  StateArray u(1, 1, 1), k(1, 1, 1), du(1, 1, 1);
  u(0, 0, 0) = 1.0;
  const Rk54Scheme scheme;
  auto bad_rhs = [](const StateArray&, double, StateArray& dd) {
    dd(0, 0, 0) = std::numeric_limits<double>::quiet_NaN();
  };
  REQUIRE_THROWS_AS(rk54_step(bad_rhs, scheme, u, k, du, 0.0, 0.1, 0), DivergenceError);
}

TEST_CASE("CFL step size: frozen value, linearity, and refinement response") {
  // advection, a = 1, level 2 on [-1,1] gives dx = 0.5; N = 3:
  // dt = cfl * dx / (|a| (2N+1)) = 0.5 * 0.5 / 7
  auto semi = advection_semi(2, 3, "constant");
  StateArray u = semi.interpolate_initial_condition(0.0);
  const double dt = compute_stable_dt(semi, u, 0.5);
  REQUIRE(dt == Catch::Approx(0.5 * 0.5 / 7.0).epsilon(1e-13));

  REQUIRE(compute_stable_dt(semi, u, 1.0) == Catch::Approx(2.0 * dt).epsilon(1e-14));

  auto fine = advection_semi(3, 3, "constant");
  StateArray uf = fine.interpolate_initial_condition(0.0);
  REQUIRE(compute_stable_dt(fine, uf, 0.5) == Catch::Approx(0.5 * dt).epsilon(1e-13));

  REQUIRE_THROWS_AS(compute_stable_dt(semi, u, 0.0), ConfigError);
  REQUIRE_THROWS_AS(compute_stable_dt(semi, u, 1.5), ConfigError);
}

TEST_CASE("CFL step size falls back to the grid size for a zero-speed field") {
  LinearAdvection1D eq{{0.0}};
  TreeMesh<1> mesh({-1.0}, {1.0}, 2, 100, {true});
  SolverConfig solver;
  solver.polydeg = 3;
  Semidiscretization<LinearAdvection1D> semi(eq, std::move(mesh), make_problem("constant", eq),
                                             solver);
  StateArray u = semi.interpolate_initial_condition(0.0);
  REQUIRE(compute_stable_dt(semi, u, 0.5) == Catch::Approx(0.5 * 0.5));
}

TEST_CASE("integrate: empty time span returns the initial condition after zero steps") {
  auto semi = advection_semi(2, 3);
  StateArray u0 = semi.interpolate_initial_condition(0.0);
  StateArray u_final;
  const RunStats stats = integrate(semi, u0, {0.0, 0.0}, 0.5,
                                   CallbackSet<LinearAdvection1D>{}, &u_final);
  REQUIRE(stats.steps == 0);
  REQUIRE(stats.rhs_evaluations == 0);
  REQUIRE(u_final.raw() == u0.raw());
}

TEST_CASE("integrate: free stream over many steps stays at the initial condition") {
  CompressibleEuler2D eq{1.4};
  TreeMesh<2> mesh({-1.0, -1.0}, {1.0, 1.0}, 2, 1000, {true, true});
  SolverConfig solver;
  solver.polydeg = 3;
  Semidiscretization<CompressibleEuler2D> semi(eq, std::move(mesh), make_problem("constant", eq),
                                               solver);
  StateArray u0 = semi.interpolate_initial_condition(0.0);
  StateArray u_final;
  const RunStats stats = integrate(semi, u0, {0.0, 1.0}, 0.9,
                                   CallbackSet<CompressibleEuler2D>{}, &u_final);
  REQUIRE(stats.steps >= 20);
  double dev = 0.0;
  for (size_t i = 0; i < u0.raw().size(); ++i)
    dev = std::max(dev, std::abs(u_final.raw()[i] - u0.raw()[i]));
  REQUIRE(dev <= 1e-13 * 25.025);
}

TEST_CASE("integrate: lands exactly on the final time and counts 5 rhs per step") {
  auto semi = advection_semi(3, 3);
  StateArray u_final;
  const RunStats stats = integrate(semi, semi.interpolate_initial_condition(0.0), {0.0, 0.3},
                                   0.47, CallbackSet<LinearAdvection1D>{}, &u_final);
  REQUIRE(stats.final_time == 0.3);
  REQUIRE(stats.rhs_evaluations == 5 * stats.steps);
}

TEST_CASE("integrate: runs are deterministic, including with worker threads") {
  auto run_once = [](int threads) {
    auto semi = advection_semi(3, 4);
    semi.set_n_threads(threads);
    StateArray u_final;
    integrate(semi, semi.interpolate_initial_condition(0.0), {0.0, 0.5}, 0.6,
              CallbackSet<LinearAdvection1D>{}, &u_final);
    return u_final.raw();
  };
  const auto a = run_once(1);
  const auto b = run_once(1);
  const auto c = run_once(3);
  REQUIRE(a == b);
  REQUIRE(a == c);
}

TEST_CASE("AMR adaptation: quiescent on constants, conservative, level-clamped") {
  CompressibleEuler2D eq{1.4};
  SolverConfig solver;
  solver.polydeg = 3;

  // constant field: indicator is zero everywhere, nothing to do at equal level
  // bounds
  {
    TreeMesh<2> mesh({-1.0, -1.0}, {1.0, 1.0}, 2, 100000, {true, true});
    Semidiscretization<CompressibleEuler2D> semi(eq, std::move(mesh),
                                                 make_problem("constant", eq), solver);
    StateArray u = semi.interpolate_initial_condition(0.0);
    AmrOptions opts;
    opts.interval = 1;
    opts.min_level = 2;
    opts.max_level = 4;
    REQUIRE_FALSE(amr_adapt(semi, u, opts));
    REQUIRE(semi.n_elements() == 16);
  }

  // forced refinement conserves the total of every variable and respects the
  // level ceiling
  {
    TreeMesh<2> mesh({-1.0, -1.0}, {1.0, 1.0}, 1, 100000, {true, true});
    Semidiscretization<CompressibleEuler2D> semi(eq, std::move(mesh),
                                                 make_problem("kelvin_helmholtz", eq), solver);
    StateArray u = semi.interpolate_initial_condition(0.0);
    std::array<double, 4> before{};
    for (int v = 0; v < 4; ++v) {
      const int vv = v;
      before[v] = semi.integrate_quantity(
          u, [vv](const CompressibleEuler2D::State& s) { return s[vv]; });
    }
    AmrOptions opts;
    opts.interval = 1;
    opts.min_level = 1;
    opts.max_level = 3;
    opts.refine_threshold = -1.0; // always refine
    REQUIRE(amr_adapt(semi, u, opts));  // 1 -> 2 everywhere
    REQUIRE(amr_adapt(semi, u, opts));  // 2 -> 3 everywhere
    REQUIRE(semi.n_elements() == 64);
    for (const int id : semi.mesh().leaf_ids())
      REQUIRE(semi.mesh().cell(id).level <= 3);
    REQUIRE_FALSE(amr_adapt(semi, u, opts)); // saturated at the ceiling
    for (int v = 0; v < 4; ++v) {
      const int vv = v;
      const double after = semi.integrate_quantity(
          u, [vv](const CompressibleEuler2D::State& s) { return s[vv]; });
      REQUIRE(std::abs(after - before[v]) <= 1e-12 * (1.0 + std::abs(before[v])));
    }
  }

  // forced coarsening from a refined start, down to the floor
  {
    TreeMesh<2> mesh({-1.0, -1.0}, {1.0, 1.0}, 3, 100000, {true, true});
    Semidiscretization<CompressibleEuler2D> semi(eq, std::move(mesh),
                                                 make_problem("density_wave", eq), solver);
    StateArray u = semi.interpolate_initial_condition(0.0);
    std::array<double, 4> before{};
    for (int v = 0; v < 4; ++v) {
      const int vv = v;
      before[v] = semi.integrate_quantity(
          u, [vv](const CompressibleEuler2D::State& s) { return s[vv]; });
    }
    AmrOptions opts;
    opts.interval = 1;
    opts.min_level = 2;
    opts.max_level = 3;
    opts.refine_threshold = 2.0;  // never refine
    opts.coarsen_threshold = 2.0; // always coarsen (alpha <= 1)
    REQUIRE(amr_adapt(semi, u, opts));
    for (const int id : semi.mesh().leaf_ids())
      REQUIRE(semi.mesh().cell(id).level >= 2);
    REQUIRE(semi.n_elements() == 16);
    for (int v = 0; v < 4; ++v) {
      const int vv = v;
      const double after = semi.integrate_quantity(
          u, [vv](const CompressibleEuler2D::State& s) { return s[vv]; });
      REQUIRE(std::abs(after - before[v]) <= 1e-12 * (1.0 + std::abs(before[v])));
    }
  }
}

TEST_CASE("integrate applies the positivity callback after each step") {
  // a blast run without shock capturing diverges quickly unless limited;
  // here we only check the limiter hook keeps nodal values above thresholds
  CompressibleEuler2D eq{1.4};
  TreeMesh<2> mesh({-1.0, -1.0}, {1.0, 1.0}, 3, 100000, {true, true});
  SolverConfig solver;
  solver.polydeg = 3;
  solver.volume_integral = VolumeIntegralKind::shock_capturing;
  solver.volume_flux = FluxKind::ec;
  solver.surface_flux = FluxKind::lax_friedrichs;
  Semidiscretization<CompressibleEuler2D> semi(eq, std::move(mesh), make_problem("blast", eq),
                                               solver);
  CallbackSet<CompressibleEuler2D> cb;
  cb.positivity.enabled = true;
  cb.positivity.rho_min = 1e-10;
  cb.positivity.p_min = 1e-10;
  double min_rho = 1e300, min_p = 1e300;
  cb.post_step_hook = [&](Semidiscretization<CompressibleEuler2D>& s, StateArray& u, double,
                          long) {
    for (int e = 0; e < s.n_elements(); ++e)
      for (int node = 0; node < s.n_nodes_per_element(); ++node) {
        min_rho = std::min(min_rho, u(e, node, 0));
        min_p = std::min(min_p, s.equations().pressure(u.get<4>(e, node)));
      }
  };
  StateArray u_final;
  const RunStats stats = integrate(semi, semi.interpolate_initial_condition(0.0), {0.0, 0.002},
                                   0.5, std::move(cb), &u_final);
  REQUIRE(stats.steps >= 1);
  REQUIRE(min_rho >= 1e-10 * (1.0 - 1e-6));
  REQUIRE(min_p >= 1e-10 * (1.0 - 1e-6));
}
