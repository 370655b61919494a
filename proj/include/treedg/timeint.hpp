#ifndef TREEDG_TIMEINT_HPP
#define TREEDG_TIMEINT_HPP

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "treedg/dg.hpp"
#include "treedg/semi.hpp"
#include "treedg/state.hpp"

namespace treedg {

// Five-stage, fourth-order low-storage (2N) explicit Runge-Kutta scheme of
// Carpenter and Kennedy. The coefficients are the published rational values;
// the measured order-4 property test guards against transcription slips.
struct Rk54Scheme {
  std::array<double, 5> a{0.0,
                          -567301805773.0 / 1357537059087.0,
                          -2404267990393.0 / 2016746695238.0,
                          -3550918686646.0 / 2091501179385.0,
                          -1275806237668.0 / 842570457699.0};
  std::array<double, 5> b{1432997174477.0 / 9575080441755.0,
                          5161836677717.0 / 13612068292357.0,
                          1720146321549.0 / 2090206949498.0,
                          3134564353537.0 / 4481467310338.0,
                          2277821191437.0 / 14882151754819.0};
  std::array<double, 5> c{0.0,
                          1432997174477.0 / 9575080441755.0,
                          2526269341429.0 / 6820363962896.0,
                          2006345519317.0 / 3224310063776.0,
                          2802321613138.0 / 2924317926251.0};
  static constexpr int n_stages = 5;
};

// One 2N-storage RK step: for each stage, k <- a_s k + dt * rhs(u, t + c_s dt)
// and u <- u + b_s k. Exactly five rhs evaluations. The stage limiter (when
// present) runs on u after every stage update, so each rhs evaluation sees an
// admissible state.
template <class RhsFn, class StageLimiter>
void rk54_step(const RhsFn& rhs, const Rk54Scheme& scheme, StateArray& u, StateArray& k,
               StateArray& du, double t, double dt, long step, const StageLimiter& stage_limiter) {
  auto& uv = u.raw();
  auto& kv = k.raw();
  auto& dv = du.raw();
  for (int s = 0; s < Rk54Scheme::n_stages; ++s) {
    rhs(u, t + scheme.c[s] * dt, du);
    const double a = scheme.a[s];
    const double b = scheme.b[s];
    for (size_t i = 0; i < uv.size(); ++i) {
      kv[i] = a * kv[i] + dt * dv[i];
      uv[i] += b * kv[i];
    }
    for (size_t i = 0; i < uv.size(); ++i) {
      if (!std::isfinite(uv[i]))
        throw DivergenceError("non-finite solution value after RK stage " + std::to_string(s) +
                              " of step " + std::to_string(step) + " at t=" + std::to_string(t));
    }
    stage_limiter(u);
  }
}

template <class RhsFn>
void rk54_step(const RhsFn& rhs, const Rk54Scheme& scheme, StateArray& u, StateArray& k,
               StateArray& du, double t, double dt, long step) {
  rk54_step(rhs, scheme, u, k, du, t, dt, step, [](StateArray&) {});
}

// CFL time step: dt = cfl * min_e dx_e / (sum_axes lambda_max(e, axis) * (2N+1))
// with lambda taken over the element's nodes. A field with zero wave speed
// everywhere falls back to dt = cfl * dx_min.
template <class Eq>
double compute_stable_dt(const Semidiscretization<Eq>& semi, const StateArray& u, double cfl) {
  if (!(cfl > 0.0) || cfl > 1.0) throw ConfigError("cfl must lie in (0, 1]");
  const int N = semi.basis().polydeg();
  double dt = std::numeric_limits<double>::infinity();
  double dx_min = std::numeric_limits<double>::infinity();
  for (int e = 0; e < semi.n_elements(); ++e) {
    double speed_sum = 0.0;
    for (int axis = 0; axis < Eq::ndims; ++axis) {
      double lambda = 0.0;
      for (int node = 0; node < semi.n_nodes_per_element(); ++node) {
        const auto s = u.template get<Eq::nvars>(e, node);
        lambda = std::max(lambda, semi.equations().max_wave_speed(s, s, axis));
      }
      speed_sum += lambda;
    }
    if (std::isnan(speed_sum))
      throw DivergenceError("NaN wave speed in element " + std::to_string(e));
    dx_min = std::min(dx_min, semi.element_dx(e));
    if (speed_sum > 0.0)
      dt = std::min(dt, semi.element_dx(e) / (speed_sum * (2.0 * N + 1.0)));
  }
  if (!std::isfinite(dt)) return cfl * dx_min;
  return cfl * dt;
}

// --- callbacks ---------------------------------------------------------------

struct PositivityOptions {
  bool enabled = false;
  double rho_min = 5e-13;
  double p_min = 5e-13;
};

struct AmrOptions {
  int interval = 0; // 0 disables
  int min_level = 0;
  int max_level = 30;
  double refine_threshold = 0.3;
  double coarsen_threshold = 0.1;
};

struct RunStats {
  long steps = 0;
  long rhs_evaluations = 0;
  double wall_seconds = 0.0;
  double final_time = 0.0;
  double last_dt = 0.0;
};

// Post-step hooks in fixed order: AMR -> analysis -> save -> alive. The
// stepsize callback (CFL) runs before each step. Positivity limiting is a
// stage hook: it runs inside the RK step after every stage update, because a
// blast that needs the limiter at all produces inadmissible nodal states
// between stages, not only between steps.
template <class Eq>
struct CallbackSet {
  PositivityOptions positivity;
  AmrOptions amr;

  int analysis_interval = 0;
  std::function<void(const Semidiscretization<Eq>&, const StateArray&, const RunStats&)>
      analysis_sink;

  int save_interval = 0;
  std::function<void(const Semidiscretization<Eq>&, const StateArray&, double, long)> save_sink;

  int alive_interval = 0;

  // test/instrumentation hook, runs after all built-ins
  std::function<void(Semidiscretization<Eq>&, StateArray&, double, long)> post_step_hook;

  bool any_enabled() const {
    return positivity.enabled || amr.interval > 0 || analysis_interval > 0 || save_interval > 0 ||
           alive_interval > 0 || static_cast<bool>(post_step_hook);
  }
};

namespace amr_detail {

template <class Eq>
std::unordered_map<int, std::vector<double>> snapshot_by_cell(const Semidiscretization<Eq>& semi,
                                                              const StateArray& u) {
  std::unordered_map<int, std::vector<double>> data;
  const int n_entries = semi.n_nodes_per_element() * Eq::nvars;
  data.reserve(semi.n_elements());
  for (int e = 0; e < semi.n_elements(); ++e) {
    const double* p = u.element_ptr(e);
    data.emplace(semi.element_cell_id(e), std::vector<double>(p, p + n_entries));
  }
  return data;
}

} // namespace amr_detail

// Evaluates the AMR indicator, refines/coarsens within the level bounds,
// transfers the solution (interpolation down, L2 projection up), and rebuilds
// the semidiscretization caches. Returns true if the mesh changed.
template <class Eq>
bool amr_adapt(Semidiscretization<Eq>& semi, StateArray& u, const AmrOptions& opts) {
  constexpr int Dim = Eq::ndims;
  constexpr int n_children = 1 << Dim;
  auto& mesh = semi.mesh_mutable();

  const std::vector<double> alpha = semi.shock_indicator_all(u, 1.0);
  std::vector<int> refine_targets;
  std::vector<int> coarsen_flagged; // leaf cell ids
  for (int e = 0; e < semi.n_elements(); ++e) {
    const int cell_id = semi.element_cell_id(e);
    const int level = mesh.cell(cell_id).level;
    if (alpha[e] > opts.refine_threshold && level < opts.max_level)
      refine_targets.push_back(cell_id);
    else if (alpha[e] < opts.coarsen_threshold && level > opts.min_level)
      coarsen_flagged.push_back(cell_id);
  }

  // group coarsen flags into complete families
  std::unordered_map<int, int> flags_per_parent;
  for (int id : coarsen_flagged) {
    const int parent = mesh.cell(id).parent;
    if (parent >= 0) ++flags_per_parent[parent];
  }
  std::vector<int> coarsen_parents;
  for (const auto& [parent, count] : flags_per_parent)
    if (count == n_children) coarsen_parents.push_back(parent);
  std::sort(coarsen_parents.begin(), coarsen_parents.end());

  if (refine_targets.empty() && coarsen_parents.empty()) return false;

  auto data = amr_detail::snapshot_by_cell(semi, u);
  const int n_entries = semi.n_nodes_per_element() * Eq::nvars;

  // refine first (balance cascades included), interpolating parents to children
  if (!refine_targets.empty()) {
    const std::vector<int> new_leaves = mesh.refine_cells(refine_targets);
    std::vector<int> refined_parents;
    for (int leaf : new_leaves) {
      const int parent = mesh.cell(leaf).parent;
      if (refined_parents.empty() || refined_parents.back() != parent)
        refined_parents.push_back(parent);
    }
    for (int parent : refined_parents) {
      const auto it = data.find(parent);
      if (it == data.end())
        throw std::logic_error("AMR refinement of a cell without data");
      for (int k = 0; k < n_children; ++k) {
        std::vector<double> child(n_entries);
        dg::transfer_refine<Dim>(semi.basis(), Eq::nvars, it->second.data(), k, child.data());
        data.emplace(mesh.cell(parent).children[k], std::move(child));
      }
      data.erase(it);
    }
  }

  // coarsen complete families, projecting children onto the parent
  if (!coarsen_parents.empty()) {
    std::unordered_map<int, std::array<int, n_children>> family_children;
    for (int parent : coarsen_parents) {
      bool intact = !mesh.cell(parent).is_leaf();
      std::array<int, n_children> kids{};
      if (intact)
        for (int k = 0; k < n_children; ++k) {
          kids[k] = mesh.cell(parent).children[k];
          if (!mesh.cell(kids[k]).is_leaf()) intact = false;
        }
      if (intact) family_children.emplace(parent, kids);
    }
    const auto report = mesh.coarsen_cells(coarsen_parents);
    for (int parent : report.accepted) {
      const auto& kids = family_children.at(parent);
      std::array<const double*, n_children> child_ptrs{};
      for (int k = 0; k < n_children; ++k) child_ptrs[k] = data.at(kids[k]).data();
      std::vector<double> parent_data(n_entries);
      dg::transfer_coarsen<Dim>(semi.basis(), Eq::nvars, child_ptrs, parent_data.data());
      for (int k = 0; k < n_children; ++k) data.erase(kids[k]);
      data.emplace(parent, std::move(parent_data));
    }
    // apply the compaction id remap
    std::unordered_map<int, std::vector<double>> remapped;
    remapped.reserve(data.size());
    for (auto& [old_id, values] : data) {
      const int new_id = report.remap[old_id];
      if (new_id >= 0) remapped.emplace(new_id, std::move(values));
    }
    data = std::move(remapped);
  }

  semi.rebuild_caches();
  StateArray u_new(Eq::nvars, semi.n_nodes_per_element(), semi.n_elements());
  for (int e = 0; e < semi.n_elements(); ++e) {
    const auto it = data.find(semi.element_cell_id(e));
    if (it == data.end()) throw std::logic_error("AMR transfer lost an element");
    double* p = u_new.element_ptr(e);
    for (int i = 0; i < n_entries; ++i) p[i] = it->second[i];
  }
  u = std::move(u_new);
  return true;
}

// Method-of-lines driver: CFL-sized RK54 steps with the callback pipeline,
// landing exactly on the final time.
template <class Eq>
RunStats integrate(Semidiscretization<Eq>& semi, StateArray u0, std::pair<double, double> tspan,
                   double cfl, CallbackSet<Eq> callbacks, StateArray* final_state) {
  const auto t_begin = std::chrono::steady_clock::now();
  const double t0 = tspan.first, t_end = tspan.second;
  if (!(t_end >= t0)) throw ConfigError("tspan must satisfy t_end >= t0");

  StateArray u = std::move(u0);
  StateArray k(u.n_vars(), u.n_nodes_per_element(), u.n_elements());
  StateArray du(u.n_vars(), u.n_nodes_per_element(), u.n_elements());

  const Rk54Scheme scheme;
  RunStats stats;
  semi.reset_rhs_call_count();
  double t = t0;
  const double t_eps = 1e-14 * std::max(std::abs(t_end), 1.0);

  auto rhs = [&semi](const StateArray& uu, double tt, StateArray& dd) { semi.rhs(uu, tt, dd); };

  auto stage_limiter = [&](StateArray& uu) {
    if (callbacks.positivity.enabled)
      semi.apply_positivity_limiter(uu, callbacks.positivity.rho_min, callbacks.positivity.p_min);
  };

  auto due = [](long step, int interval) { return interval > 0 && step % interval == 0; };

  auto run_post_step = [&](long step, double time, double dt) {
    if (due(step, callbacks.amr.interval)) {
      if (amr_adapt(semi, u, callbacks.amr)) {
        k = StateArray(u.n_vars(), u.n_nodes_per_element(), u.n_elements());
        du = StateArray(u.n_vars(), u.n_nodes_per_element(), u.n_elements());
      }
    }
    stats.steps = step;
    stats.rhs_evaluations = semi.rhs_call_count();
    stats.final_time = time;
    stats.last_dt = dt;
    const bool at_end = std::abs(time - t_end) <= t_eps;
    if ((due(step, callbacks.analysis_interval) || (at_end && callbacks.analysis_interval > 0)) &&
        callbacks.analysis_sink)
      callbacks.analysis_sink(semi, u, stats);
    if ((due(step, callbacks.save_interval) || (at_end && callbacks.save_interval > 0)) &&
        callbacks.save_sink)
      callbacks.save_sink(semi, u, time, step);
    if (due(step, callbacks.alive_interval))
      std::printf("  step %8ld  t=%-12.6g dt=%-12.6g\n", step, time, dt);
    if (callbacks.post_step_hook) callbacks.post_step_hook(semi, u, time, step);
  };

  long step = 0;
  while (t_end - t > t_eps) {
    double dt = compute_stable_dt(semi, u, cfl);
    if (dt >= t_end - t) dt = t_end - t; // final clamp lands on t_end exactly
    rk54_step(rhs, scheme, u, k, du, t, dt, step, stage_limiter);
    t = (dt == t_end - t) ? t_end : t + dt;
    ++step;
    run_post_step(step, t, dt);
  }

  stats.steps = step;
  stats.rhs_evaluations = semi.rhs_call_count();
  stats.final_time = t;
  stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  if (final_state) *final_state = std::move(u);
  return stats;
}

} // namespace treedg

#endif
