#ifndef TREEDG_SEMI_HPP
#define TREEDG_SEMI_HPP

#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "treedg/basis.hpp"
#include "treedg/dg.hpp"
#include "treedg/equations.hpp"
#include "treedg/errors.hpp"
#include "treedg/initial_conditions.hpp"
#include "treedg/mesh.hpp"
#include "treedg/parallel.hpp"
#include "treedg/state.hpp"

namespace treedg {

struct AnalysisReport {
  double time = 0.0;
  std::vector<double> l2_error;   // per variable, empty when no reference
  std::vector<double> linf_error;
  std::vector<double> integrals;  // per conserved variable
  double total_entropy = 0.0;
  double kinetic_energy = 0.0;
};

// Bundles mesh + equations + initial/boundary conditions + source terms +
// solver into a right-hand-side evaluator, together with the element geometry
// and interface caches. There is no hidden global state; independent
// instances can coexist and be used from different threads.
template <class Eq>
class Semidiscretization {
public:
  static constexpr int Dim = Eq::ndims;
  using Mesh = TreeMesh<Dim>;
  using State = typename Eq::State;
  using Coord = std::array<double, Dim>;
  using Interfaces = typename Mesh::InterfaceSet;

  Semidiscretization(const Eq& eq, Mesh mesh, Problem<Eq> problem, const SolverConfig& solver,
                     int n_threads = 1)
      : eq_(eq), mesh_(std::move(mesh)), problem_(std::move(problem)), solver_(solver),
        basis_(solver.polydeg), n_threads_(n_threads) {
    if (solver_.alpha_max < 0.0 || solver_.alpha_max > 1.0)
      throw ConfigError("alpha_max must lie in [0, 1]");
    // tensor-product quadrature weights per node
    const int n = basis_.n_nodes();
    if constexpr (Dim == 1) {
      node_weights_ = basis_.weights();
    } else {
      node_weights_.resize(static_cast<size_t>(n) * n);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          node_weights_[i + static_cast<size_t>(n) * j] = basis_.weights()[i] * basis_.weights()[j];
    }
    rebuild_caches();
  }

  const Eq& equations() const { return eq_; }
  const Mesh& mesh() const { return mesh_; }
  Mesh& mesh_mutable() { return mesh_; }
  const LglBasis& basis() const { return basis_; }
  const SolverConfig& solver() const { return solver_; }
  const Problem<Eq>& problem() const { return problem_; }
  const Interfaces& interfaces() const { return interfaces_; }
  const std::vector<double>& node_weights() const { return node_weights_; }

  int n_elements() const { return static_cast<int>(element_cell_.size()); }
  int n_nodes_per_element() const {
    const int n = basis_.n_nodes();
    return (Dim == 1) ? n : n * n;
  }
  int n_threads() const { return n_threads_; }
  void set_n_threads(int k) { n_threads_ = std::max(1, k); }

  long rhs_call_count() const { return rhs_calls_.load(); }
  void reset_rhs_call_count() { rhs_calls_.store(0); }

  double element_dx(int e) const { return element_dx_[e]; }
  double element_jacobian(int e) const { return element_jacobian_[e]; }
  int element_cell_id(int e) const { return element_cell_[e]; }
  int element_of_cell(int cell_id) const {
    if (cell_id < 0 || cell_id >= static_cast<int>(cell_to_element_.size()) ||
        cell_to_element_[cell_id] < 0)
      throw std::out_of_range("cell " + std::to_string(cell_id) + " is not a leaf element");
    return cell_to_element_[cell_id];
  }

  Coord node_coords(int e, int node) const {
    const int n = basis_.n_nodes();
    const auto& center = mesh_.cell(element_cell_[e]).center;
    const double half = 0.5 * element_dx_[e];
    Coord x;
    if constexpr (Dim == 1) {
      x[0] = center[0] + half * basis_.nodes()[node];
    } else {
      x[0] = center[0] + half * basis_.nodes()[node % n];
      x[1] = center[1] + half * basis_.nodes()[node / n];
    }
    return x;
  }

  // Rebuilds geometry and interface caches from the current mesh. Must be
  // called after any mesh mutation.
  void rebuild_caches() {
    const auto leaves = mesh_.leaf_ids();
    element_cell_ = leaves;
    const int ne = static_cast<int>(leaves.size());
    element_dx_.resize(ne);
    element_jacobian_.resize(ne);
    cell_to_element_.assign(mesh_.n_cells(), -1);
    for (int e = 0; e < ne; ++e) {
      element_dx_[e] = mesh_.cell_size(leaves[e]);
      element_jacobian_[e] = mesh_.cell_jacobian(leaves[e]);
      cell_to_element_[leaves[e]] = e;
    }
    interfaces_ = mesh_.enumerate_interfaces();
    const int fn = n_face_nodes();
    conforming_flux_.assign(interfaces_.conforming.size(),
                            std::vector<double>(static_cast<size_t>(fn) * Eq::nvars));
    boundary_flux_.assign(interfaces_.boundaries.size(),
                          std::vector<double>(static_cast<size_t>(fn) * Eq::nvars));
    mortar_flux_small_.assign(interfaces_.mortars.size(),
                              {std::vector<double>(static_cast<size_t>(fn) * Eq::nvars),
                               std::vector<double>(static_cast<size_t>(fn) * Eq::nvars)});
    mortar_flux_large_.assign(interfaces_.mortars.size(),
                              std::vector<double>(static_cast<size_t>(fn) * Eq::nvars));
  }

  // Nodal interpolation of the initial condition at time t0.
  StateArray interpolate_initial_condition(double t0) const {
    StateArray u(Eq::nvars, n_nodes_per_element(), n_elements());
    for (int e = 0; e < n_elements(); ++e) {
      for (int node = 0; node < n_nodes_per_element(); ++node) {
        const State s = problem_.evaluate(node_coords(e, node), t0);
        if (!eq_.admissible(s))
          throw DivergenceError("initial condition produced an inadmissible state in element " +
                                std::to_string(e));
        u.set<Eq::nvars>(e, node, s);
      }
    }
    return u;
  }

  // Spatial operator: du = -div(f) + s, assembled from the configured volume
  // integral, interface/mortar/boundary fluxes, and source terms.
  void rhs(const StateArray& u, double t, StateArray& du) const {
    rhs_calls_.fetch_add(1, std::memory_order_relaxed);
    du.fill(0.0);

    // volume terms + source, element-parallel
    parallel_for(n_elements(), n_threads_, [&](int e) {
      try {
        volume_element(u, t, du, e);
      } catch (const DivergenceError& err) {
        throw DivergenceError(std::string(err.what()) + " [element " + std::to_string(e) +
                              ", t=" + std::to_string(t) + "]");
      }
    });

    // face fluxes, face-parallel into per-face buffers
    parallel_for(static_cast<int>(interfaces_.conforming.size()), n_threads_,
                 [&](int f) { compute_conforming_flux(u, f); });
    parallel_for(static_cast<int>(interfaces_.mortars.size()), n_threads_,
                 [&](int m) { compute_mortar_flux(u, m); });
    parallel_for(static_cast<int>(interfaces_.boundaries.size()), n_threads_,
                 [&](int b) { compute_boundary_flux(u, t, b); });

    // scatter: lift (F* - f(trace)) into the owning elements; sequential so
    // the result does not depend on the thread count
    for (size_t f = 0; f < interfaces_.conforming.size(); ++f) {
      const auto& face = interfaces_.conforming[f];
      lift_face(u, du, face.left, face.axis, 1, conforming_flux_[f].data());
      lift_face(u, du, face.right, face.axis, 0, conforming_flux_[f].data());
    }
    for (size_t m = 0; m < interfaces_.mortars.size(); ++m) {
      const auto& mor = interfaces_.mortars[m];
      const int small_side = 1 - mor.large_side;
      lift_face(u, du, mor.small[0], mor.axis, small_side, mortar_flux_small_[m][0].data());
      lift_face(u, du, mor.small[1], mor.axis, small_side, mortar_flux_small_[m][1].data());
      lift_face(u, du, mor.large, mor.axis, mor.large_side, mortar_flux_large_[m].data());
    }
    for (size_t b = 0; b < interfaces_.boundaries.size(); ++b) {
      const auto& face = interfaces_.boundaries[b];
      lift_face(u, du, face.element, face.axis, face.side, boundary_flux_[b].data());
    }
  }

  // --- analysis -----------------------------------------------------------------

  double integrate_quantity(const StateArray& u,
                            const std::function<double(const State&)>& quantity) const {
    double total = 0.0;
    for (int e = 0; e < n_elements(); ++e) {
      const double jac = element_jacobian_[e];
      for (int node = 0; node < n_nodes_per_element(); ++node)
        total += node_weights_[node] * jac * quantity(u.get<Eq::nvars>(e, node));
    }
    return total;
  }

  // Mass-normalized L2 and pointwise Linf errors against a reference field.
  void compute_errors(const StateArray& u, double t,
                      const std::function<State(const Coord&, double)>& reference,
                      std::vector<double>& l2, std::vector<double>& linf) const {
    l2.assign(Eq::nvars, 0.0);
    linf.assign(Eq::nvars, 0.0);
    double measure = 0.0;
    for (int e = 0; e < n_elements(); ++e) {
      const double jac = element_jacobian_[e];
      for (int node = 0; node < n_nodes_per_element(); ++node) {
        const State ref = reference(node_coords(e, node), t);
        const double wj = node_weights_[node] * jac;
        measure += wj;
        for (int v = 0; v < Eq::nvars; ++v) {
          const double d = u(e, node, v) - ref[v];
          l2[v] += wj * d * d;
          linf[v] = std::max(linf[v], std::abs(d));
        }
      }
    }
    for (int v = 0; v < Eq::nvars; ++v) l2[v] = std::sqrt(l2[v] / measure);
  }

  AnalysisReport analyze(const StateArray& u, double t) const {
    AnalysisReport rep;
    rep.time = t;
    rep.integrals.assign(Eq::nvars, 0.0);
    for (int e = 0; e < n_elements(); ++e) {
      const double jac = element_jacobian_[e];
      for (int node = 0; node < n_nodes_per_element(); ++node) {
        const double wj = node_weights_[node] * jac;
        const State s = u.get<Eq::nvars>(e, node);
        for (int v = 0; v < Eq::nvars; ++v) rep.integrals[v] += wj * s[v];
        rep.total_entropy += wj * eq_.cons2entropy(s).entropy;
        if constexpr (Eq::nvars > 1) {
          double msq = 0.0;
          for (int j = 0; j < Dim; ++j) msq += s[1 + j] * s[1 + j];
          rep.kinetic_energy += wj * 0.5 * msq / s[0];
        }
      }
    }
    if (problem_.has_exact_solution)
      compute_errors(u, t, problem_.evaluate, rep.l2_error, rep.linf_error);
    return rep;
  }

  void apply_positivity_limiter(StateArray& u, double rho_min, double p_min) const {
    if constexpr (Eq::nvars == 1) {
      (void)u; (void)rho_min; (void)p_min;
    } else {
      parallel_for(n_elements(), n_threads_, [&](int e) {
        dg::positivity_limit_element(basis_, eq_, node_weights_, u.element_ptr(e), e, rho_min,
                                     p_min);
      });
    }
  }

  std::vector<double> shock_indicator_all(const StateArray& u, double alpha_max) const {
    std::vector<double> alpha(n_elements());
    parallel_for(n_elements(), n_threads_, [&](int e) {
      alpha[e] = dg::shock_indicator(basis_, eq_, u.element_ptr(e), alpha_max);
    });
    return alpha;
  }

private:
  int n_face_nodes() const { return (Dim == 1) ? 1 : basis_.n_nodes(); }

  // node index of the k-th node on a face (axis, side)
  int face_node(int axis, int side, int k) const {
    const int n = basis_.n_nodes();
    if constexpr (Dim == 1) {
      (void)axis; (void)k;
      return side == 1 ? n - 1 : 0;
    } else {
      if (axis == 0) return (side == 1 ? n - 1 : 0) + n * k;
      return k + n * (side == 1 ? n - 1 : 0);
    }
  }

  void extract_trace(const StateArray& u, int e, int axis, int side, double* out) const {
    for (int k = 0; k < n_face_nodes(); ++k) {
      const double* p = u.node_ptr(e, face_node(axis, side, k));
      for (int v = 0; v < Eq::nvars; ++v) out[static_cast<size_t>(k) * Eq::nvars + v] = p[v];
    }
  }

  void volume_element(const StateArray& u, double t, StateArray& du, int e) const {
    const double* ue = u.element_ptr(e);
    double* de = du.element_ptr(e);
    switch (solver_.volume_integral) {
      case VolumeIntegralKind::weak_form:
        dg::volume_weak_form(basis_, eq_, ue, de);
        break;
      case VolumeIntegralKind::flux_differencing:
        dg::volume_flux_differencing(basis_, eq_, solver_.volume_flux, ue, de);
        break;
      case VolumeIntegralKind::shock_capturing: {
        const double alpha = dg::shock_indicator(basis_, eq_, ue, solver_.alpha_max);
        dg::volume_blended(basis_, eq_, solver_.volume_flux, solver_.fv_flux, alpha, ue, de);
        break;
      }
    }
    const double scale = 2.0 / element_dx_[e];
    const int n_entries = n_nodes_per_element() * Eq::nvars;
    for (int i = 0; i < n_entries; ++i) de[i] *= scale;

    if (problem_.source) {
      for (int node = 0; node < n_nodes_per_element(); ++node) {
        const State s = problem_.source(t, node_coords(e, node), u.get<Eq::nvars>(e, node));
        double* p = du.node_ptr(e, node);
        for (int v = 0; v < Eq::nvars; ++v) p[v] += s[v];
      }
    }
  }

  void compute_conforming_flux(const StateArray& u, int f) const {
    const auto& face = interfaces_.conforming[f];
    double* out = conforming_flux_[f].data();
    for (int k = 0; k < n_face_nodes(); ++k) {
      const State uL = u.get<Eq::nvars>(face.left, face_node(face.axis, 1, k));
      const State uR = u.get<Eq::nvars>(face.right, face_node(face.axis, 0, k));
      const State fs = numerical_flux(solver_.surface_flux, eq_, uL, uR, face.axis);
      for (int v = 0; v < Eq::nvars; ++v) out[static_cast<size_t>(k) * Eq::nvars + v] = fs[v];
    }
  }

  void compute_boundary_flux(const StateArray& u, double t, int b) const {
    const auto& face = interfaces_.boundaries[b];
    double* out = boundary_flux_[b].data();
    for (int k = 0; k < n_face_nodes(); ++k) {
      const int node = face_node(face.axis, face.side, k);
      const State inner = u.get<Eq::nvars>(face.element, node);
      const State ghost = problem_.evaluate(node_coords(face.element, node), t);
      const State fs = (face.side == 1)
                           ? numerical_flux(solver_.surface_flux, eq_, inner, ghost, face.axis)
                           : numerical_flux(solver_.surface_flux, eq_, ghost, inner, face.axis);
      for (int v = 0; v < Eq::nvars; ++v) out[static_cast<size_t>(k) * Eq::nvars + v] = fs[v];
    }
  }

  void compute_mortar_flux(const StateArray& u, int m) const {
    static_assert(Dim == 1 || Dim == 2);
    const auto& mor = interfaces_.mortars[m];
    const int fn = n_face_nodes();
    const int nv = Eq::nvars;
    const int small_side = 1 - mor.large_side;

    std::vector<double> trace_large(static_cast<size_t>(fn) * nv);
    extract_trace(u, mor.large, mor.axis, mor.large_side, trace_large.data());

    // project the large-face polynomial onto the two child faces
    std::array<std::vector<double>, 2> proj;
    for (int s = 0; s < 2; ++s) {
      const Matrix& P = (s == 0) ? basis_.mortar_forward_lower() : basis_.mortar_forward_upper();
      proj[s].assign(static_cast<size_t>(fn) * nv, 0.0);
      for (int i = 0; i < fn; ++i)
        for (int k = 0; k < fn; ++k) {
          const double w = P(i, k);
          for (int v = 0; v < nv; ++v)
            proj[s][static_cast<size_t>(i) * nv + v] += w * trace_large[static_cast<size_t>(k) * nv + v];
        }
    }

    for (int s = 0; s < 2; ++s) {
      double* out = mortar_flux_small_[m][s].data();
      for (int k = 0; k < fn; ++k) {
        State u_large, u_small;
        for (int v = 0; v < nv; ++v) u_large[v] = proj[s][static_cast<size_t>(k) * nv + v];
        u_small = u.get<Eq::nvars>(mor.small[s], face_node(mor.axis, small_side, k));
        const State fs = (mor.large_side == 1)
                             ? numerical_flux(solver_.surface_flux, eq_, u_large, u_small, mor.axis)
                             : numerical_flux(solver_.surface_flux, eq_, u_small, u_large, mor.axis);
        for (int v = 0; v < nv; ++v) out[static_cast<size_t>(k) * nv + v] = fs[v];
      }
    }

    // project the small-face fluxes back to the large face (conservative L2)
    double* large_out = mortar_flux_large_[m].data();
    for (int i = 0; i < fn * nv; ++i) large_out[i] = 0.0;
    for (int s = 0; s < 2; ++s) {
      const Matrix& R = (s == 0) ? basis_.mortar_reverse_lower() : basis_.mortar_reverse_upper();
      const double* fs = mortar_flux_small_[m][s].data();
      for (int i = 0; i < fn; ++i)
        for (int k = 0; k < fn; ++k) {
          const double w = R(i, k);
          for (int v = 0; v < nv; ++v)
            large_out[static_cast<size_t>(i) * nv + v] += w * fs[static_cast<size_t>(k) * nv + v];
        }
    }
  }

  // du at the face nodes += sign * (2/dx) * (1/w_end) * (F* - f(trace)),
  // sign = +1 on the negative side, -1 on the positive side.
  void lift_face(const StateArray& u, StateArray& du, int e, int axis, int side,
                 const double* fstar) const {
    const int n = basis_.n_nodes();
    const double coeff = (side == 1 ? -1.0 : 1.0) * (2.0 / element_dx_[e]) *
                         basis_.inv_weights()[side == 1 ? n - 1 : 0];
    for (int k = 0; k < n_face_nodes(); ++k) {
      const int node = face_node(axis, side, k);
      const State trace = u.get<Eq::nvars>(e, node);
      const State f_own = eq_.physical_flux(trace, axis);
      double* p = du.node_ptr(e, node);
      for (int v = 0; v < Eq::nvars; ++v)
        p[v] += coeff * (fstar[static_cast<size_t>(k) * Eq::nvars + v] - f_own[v]);
    }
  }

  Eq eq_;
  Mesh mesh_;
  Problem<Eq> problem_;
  SolverConfig solver_;
  LglBasis basis_;
  int n_threads_;

  std::vector<int> element_cell_;
  std::vector<int> cell_to_element_;
  std::vector<double> element_dx_, element_jacobian_;
  std::vector<double> node_weights_;
  Interfaces interfaces_;

  mutable std::vector<std::vector<double>> conforming_flux_;
  mutable std::vector<std::vector<double>> boundary_flux_;
  mutable std::vector<std::array<std::vector<double>, 2>> mortar_flux_small_;
  mutable std::vector<std::vector<double>> mortar_flux_large_;
  mutable std::atomic<long> rhs_calls_{0};
};

// Convenience constructor mirroring the usual setup flow: checks component
// compatibility and builds all caches.
template <class Eq>
Semidiscretization<Eq> make_semidiscretization(const Eq& eq, TreeMesh<Eq::ndims> mesh,
                                               const std::string& initial_condition,
                                               const SolverConfig& solver, int n_threads = 1) {
  return Semidiscretization<Eq>(eq, std::move(mesh), make_problem(initial_condition, eq), solver,
                                n_threads);
}

} // namespace treedg

#endif
