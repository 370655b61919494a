#ifndef TREEDG_DG_HPP
#define TREEDG_DG_HPP

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "treedg/basis.hpp"
#include "treedg/equations.hpp"
#include "treedg/errors.hpp"
#include "treedg/state.hpp"

namespace treedg {

enum class VolumeIntegralKind { weak_form, flux_differencing, shock_capturing };

inline const char* volume_integral_name(VolumeIntegralKind k) {
  switch (k) {
    case VolumeIntegralKind::weak_form: return "weak_form";
    case VolumeIntegralKind::flux_differencing: return "flux_differencing";
    case VolumeIntegralKind::shock_capturing: return "shock_capturing";
  }
  return "?";
}

// Numerical parameters of the DGSEM solver: polynomial degree, surface flux,
// and the volume integral variant with its fluxes and indicator settings.
struct SolverConfig {
  int polydeg = 3;
  FluxKind surface_flux = FluxKind::lax_friedrichs;
  VolumeIntegralKind volume_integral = VolumeIntegralKind::weak_form;
  FluxKind volume_flux = FluxKind::ec;        // flux_differencing / shock_capturing
  FluxKind fv_flux = FluxKind::lax_friedrichs; // sub-cell FV in shock_capturing
  double alpha_max = 0.5;
};

namespace dg {

// Lines of nodes along one axis of the tensor grid: (start, stride) pairs.
// 1D has one line; 2D has N+1 lines per axis.
struct LineRange {
  int count;
  int first_stride;  // distance between consecutive line starts
  int node_stride;   // distance between consecutive nodes on a line
};

template <int Dim>
inline LineRange lines_along(int axis, int n) {
  if constexpr (Dim == 1) {
    return {1, 0, 1};
  } else {
    return (axis == 0) ? LineRange{n, n, 1} : LineRange{n, 1, n};
  }
}

// --- volume integrals (reference element, unscaled) -------------------------
//
// All kernels accumulate into du; the caller applies the 2/dx metric factor.

// Strong collocation form, du_i -= sum_j D_ij f(u_j) per axis. Algebraically
// equivalent to the weak form once the surface terms lift F* - f.
template <class Eq>
void volume_weak_form(const LglBasis& basis, const Eq& eq, const double* u, double* du) {
  constexpr int nv = Eq::nvars;
  const int n = basis.n_nodes();
  const Matrix& D = basis.deriv();
  std::vector<typename Eq::State> f(n);
  for (int axis = 0; axis < Eq::ndims; ++axis) {
    const LineRange lr = lines_along<Eq::ndims>(axis, n);
    for (int line = 0; line < lr.count; ++line) {
      const int base = line * lr.first_stride;
      for (int k = 0; k < n; ++k) {
        typename Eq::State uk;
        const double* p = u + static_cast<size_t>(base + k * lr.node_stride) * nv;
        for (int v = 0; v < nv; ++v) uk[v] = p[v];
        f[k] = eq.physical_flux(uk, axis);
      }
      for (int i = 0; i < n; ++i) {
        double* q = du + static_cast<size_t>(base + i * lr.node_stride) * nv;
        for (int k = 0; k < n; ++k) {
          const double d = D(i, k);
          for (int v = 0; v < nv; ++v) q[v] -= d * f[k][v];
        }
      }
    }
  }
}

// Flux differencing, du_i -= 2 sum_j D_ij F(u_i, u_j) per axis, with a
// symmetric two-point volume flux F evaluated once per node pair.
template <class Eq>
void volume_flux_differencing(const LglBasis& basis, const Eq& eq, FluxKind volume_flux,
                              const double* u, double* du) {
  constexpr int nv = Eq::nvars;
  const int n = basis.n_nodes();
  const Matrix& D = basis.deriv();
  std::vector<typename Eq::State> us(n);
  for (int axis = 0; axis < Eq::ndims; ++axis) {
    const LineRange lr = lines_along<Eq::ndims>(axis, n);
    for (int line = 0; line < lr.count; ++line) {
      const int base = line * lr.first_stride;
      for (int k = 0; k < n; ++k) {
        const double* p = u + static_cast<size_t>(base + k * lr.node_stride) * nv;
        for (int v = 0; v < nv; ++v) us[k][v] = p[v];
      }
      for (int i = 0; i < n; ++i) {
        double* qi = du + static_cast<size_t>(base + i * lr.node_stride) * nv;
        const auto fii = eq.physical_flux(us[i], axis); // F(u,u) = f(u)
        const double dii = 2.0 * D(i, i);
        for (int v = 0; v < nv; ++v) qi[v] -= dii * fii[v];
        for (int j = i + 1; j < n; ++j) {
          const auto fij = numerical_flux(volume_flux, eq, us[i], us[j], axis);
          double* qj = du + static_cast<size_t>(base + j * lr.node_stride) * nv;
          const double dij = 2.0 * D(i, j);
          const double dji = 2.0 * D(j, i);
          for (int v = 0; v < nv; ++v) {
            qi[v] -= dij * fij[v];
            qj[v] -= dji * fij[v];
          }
        }
      }
    }
  }
}

// First-order finite volume on the N+1 sub-cells per axis (widths w_i on the
// reference element). The element-boundary sub-faces use the local physical
// flux; the difference against the interface flux F* is added by the shared
// surface lifting, which keeps the blend conservative for any alpha.
template <class Eq>
void volume_subcell_fv(const LglBasis& basis, const Eq& eq, FluxKind fv_flux, const double* u,
                       double* du) {
  constexpr int nv = Eq::nvars;
  const int n = basis.n_nodes();
  const auto& invw = basis.inv_weights();
  std::vector<typename Eq::State> us(n);
  std::vector<typename Eq::State> fhat(n + 1);
  for (int axis = 0; axis < Eq::ndims; ++axis) {
    const LineRange lr = lines_along<Eq::ndims>(axis, n);
    for (int line = 0; line < lr.count; ++line) {
      const int base = line * lr.first_stride;
      for (int k = 0; k < n; ++k) {
        const double* p = u + static_cast<size_t>(base + k * lr.node_stride) * nv;
        for (int v = 0; v < nv; ++v) us[k][v] = p[v];
      }
      fhat[0] = eq.physical_flux(us[0], axis);
      for (int k = 1; k < n; ++k)
        fhat[k] = numerical_flux(fv_flux, eq, us[k - 1], us[k], axis);
      fhat[n] = eq.physical_flux(us[n - 1], axis);
      for (int i = 0; i < n; ++i) {
        double* q = du + static_cast<size_t>(base + i * lr.node_stride) * nv;
        for (int v = 0; v < nv; ++v) q[v] -= invw[i] * (fhat[i + 1][v] - fhat[i][v]);
      }
    }
  }
}

// Convex blend (1 - alpha) * flux differencing + alpha * sub-cell FV.
template <class Eq>
void volume_blended(const LglBasis& basis, const Eq& eq, FluxKind volume_flux, FluxKind fv_flux,
                    double alpha, const double* u, double* du) {
  if (alpha <= 0.0) {
    volume_flux_differencing(basis, eq, volume_flux, u, du);
    return;
  }
  const int n = basis.n_nodes();
  const int n_entries = Eq::nvars * ((Eq::ndims == 1) ? n : n * n);
  std::vector<double> dg_part(n_entries, 0.0), fv_part(n_entries, 0.0);
  if (alpha < 1.0) volume_flux_differencing(basis, eq, volume_flux, u, dg_part.data());
  volume_subcell_fv(basis, eq, fv_flux, u, fv_part.data());
  for (int i = 0; i < n_entries; ++i) du[i] += (1.0 - alpha) * dg_part[i] + alpha * fv_part[i];
}

// --- troubled-cell indicator -------------------------------------------------

// Modal-energy indicator of Hennemann-Gassner type on rho*p (Euler) or u
// (scalar): fraction of energy in the two highest Legendre mode bands, mapped
// through a sigmoid with threshold T(N) = 0.5 * 10^(-1.8 (N+1)^(1/4)).
template <class Eq>
double shock_indicator(const LglBasis& basis, const Eq& eq, const double* u, double alpha_max) {
  constexpr int nv = Eq::nvars;
  const int n = basis.n_nodes();
  const int N = basis.polydeg();
  const int n_nodes_total = (Eq::ndims == 1) ? n : n * n;

  std::vector<double> q(n_nodes_total);
  for (int node = 0; node < n_nodes_total; ++node) {
    const double* p = u + static_cast<size_t>(node) * nv;
    if constexpr (Eq::nvars == 1) {
      q[node] = p[0];
    } else {
      typename Eq::State st;
      for (int v = 0; v < nv; ++v) st[v] = p[v];
      q[node] = st[0] * eq.pressure(st);
    }
  }

  std::vector<double> modal(n_nodes_total);
  if constexpr (Eq::ndims == 1) {
    basis.nodal_to_modal(q.data(), modal.data());
  } else {
    std::vector<double> tmp(n_nodes_total), row(n), out(n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) row[i] = q[i + n * j];
      basis.nodal_to_modal(row.data(), out.data());
      for (int i = 0; i < n; ++i) tmp[i + n * j] = out[i];
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) row[j] = tmp[i + n * j];
      basis.nodal_to_modal(row.data(), out.data());
      for (int j = 0; j < n; ++j) modal[i + n * j] = out[j];
    }
  }

  auto band_energy = [&](int max_mode) {
    double e = 0.0;
    if constexpr (Eq::ndims == 1) {
      for (int k = 0; k <= max_mode; ++k) e += modal[k] * modal[k];
    } else {
      for (int j = 0; j <= max_mode; ++j)
        for (int i = 0; i <= max_mode; ++i) e += modal[i + n * j] * modal[i + n * j];
    }
    return e;
  };

  const double total = band_energy(N);
  const double clip1 = band_energy(N - 1);
  double frac = (total > 0.0) ? (total - clip1) / total : 0.0;
  if (N >= 2 && clip1 > 0.0) {
    const double clip2 = band_energy(N - 2);
    frac = std::max(frac, (clip1 - clip2) / clip1);
  }

  const double threshold = 0.5 * std::pow(10.0, -1.8 * std::pow(N + 1.0, 0.25));
  const double sharpness = 9.21024036697585; // ln(1/0.0001 - 1)
  double alpha = 1.0 / (1.0 + std::exp(-sharpness / threshold * (frac - threshold)));
  if (alpha < 1e-3 * alpha_max) alpha = 0.0;
  return std::min(alpha, alpha_max);
}

// --- positivity limiter --------------------------------------------------------

// Scales nodal states toward the w-weighted cell mean so density and then
// pressure stay above the given thresholds. Cell means are unchanged. Scalar
// equations pass through untouched.
template <class Eq>
void positivity_limit_element(const LglBasis& basis, const Eq& eq,
                              const std::vector<double>& node_weights, double* u, int element,
                              double rho_min, double p_min) {
  if constexpr (Eq::nvars == 1) {
    (void)basis; (void)eq; (void)node_weights; (void)u; (void)element;
    (void)rho_min; (void)p_min;
    return;
  } else {
    constexpr int nv = Eq::nvars;
    const int n_nodes = static_cast<int>(node_weights.size());
    const double total_w = (Eq::ndims == 1) ? 2.0 : 4.0;

    typename Eq::State mean{};
    for (int node = 0; node < n_nodes; ++node) {
      const double* p = u + static_cast<size_t>(node) * nv;
      for (int v = 0; v < nv; ++v) mean[v] += node_weights[node] * p[v];
    }
    for (int v = 0; v < nv; ++v) mean[v] /= total_w;

    auto scale_toward_mean = [&](double theta) {
      if (theta >= 1.0) return;
      for (int node = 0; node < n_nodes; ++node) {
        double* p = u + static_cast<size_t>(node) * nv;
        for (int v = 0; v < nv; ++v) p[v] = mean[v] + theta * (p[v] - mean[v]);
      }
    };

    // density pass
    double rho_node_min = mean[0];
    for (int node = 0; node < n_nodes; ++node)
      rho_node_min = std::min(rho_node_min, u[static_cast<size_t>(node) * nv]);
    if (rho_node_min < rho_min) {
      if (!(mean[0] > rho_min))
        throw DivergenceError("positivity limiter failed: element " + std::to_string(element) +
                              " has mean density " + std::to_string(mean[0]) +
                              " below threshold");
      scale_toward_mean((mean[0] - rho_min) / (mean[0] - rho_node_min));
    }

    // pressure pass; p is concave in u, so the linear theta bound suffices
    const double p_mean = eq.pressure(mean);
    double p_node_min = p_mean;
    for (int node = 0; node < n_nodes; ++node) {
      typename Eq::State st;
      const double* p = u + static_cast<size_t>(node) * nv;
      for (int v = 0; v < nv; ++v) st[v] = p[v];
      p_node_min = std::min(p_node_min, eq.pressure(st));
    }
    if (p_node_min < p_min) {
      if (!(p_mean > p_min))
        throw DivergenceError("positivity limiter failed: element " + std::to_string(element) +
                              " has mean pressure " + std::to_string(p_mean) +
                              " below threshold");
      scale_toward_mean((p_mean - p_min) / (p_mean - p_node_min));
    }
  }
}

// --- AMR solution transfer -------------------------------------------------------

// Interpolate a parent element polynomial onto one child's nodes (exact for
// degree <= N). Child index bit a selects the upper half along axis a.
template <int Dim>
void transfer_refine(const LglBasis& basis, int n_vars, const double* parent, int child_index,
                     double* child) {
  const int n = basis.n_nodes();
  const Matrix& px = ((child_index >> 0) & 1) ? basis.mortar_forward_upper()
                                              : basis.mortar_forward_lower();
  if constexpr (Dim == 1) {
    for (int i = 0; i < n; ++i)
      for (int v = 0; v < n_vars; ++v) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += px(i, k) * parent[static_cast<size_t>(k) * n_vars + v];
        child[static_cast<size_t>(i) * n_vars + v] = s;
      }
  } else {
    const Matrix& py = ((child_index >> 1) & 1) ? basis.mortar_forward_upper()
                                                : basis.mortar_forward_lower();
    // tmp(i, l) = sum_k px(i, k) parent(k, l)
    std::vector<double> tmp(static_cast<size_t>(n) * n * n_vars, 0.0);
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
          const double m = px(i, k);
          const double* src = parent + (static_cast<size_t>(k) + static_cast<size_t>(n) * l) * n_vars;
          double* dst = tmp.data() + (static_cast<size_t>(i) + static_cast<size_t>(n) * l) * n_vars;
          for (int v = 0; v < n_vars; ++v) dst[v] += m * src[v];
        }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double* dst = child + (static_cast<size_t>(i) + static_cast<size_t>(n) * j) * n_vars;
        for (int v = 0; v < n_vars; ++v) dst[v] = 0.0;
        for (int l = 0; l < n; ++l) {
          const double m = py(j, l);
          const double* src = tmp.data() + (static_cast<size_t>(i) + static_cast<size_t>(n) * l) * n_vars;
          for (int v = 0; v < n_vars; ++v) dst[v] += m * src[v];
        }
      }
  }
}

// L2-project the 2^Dim child polynomials onto the parent (conservative;
// exactly undoes transfer_refine on polynomial data).
template <int Dim>
void transfer_coarsen(const LglBasis& basis, int n_vars,
                      const std::array<const double*, (1 << Dim)>& children, double* parent) {
  const int n = basis.n_nodes();
  const int n_nodes = (Dim == 1) ? n : n * n;
  for (int i = 0; i < n_nodes * n_vars; ++i) parent[i] = 0.0;
  for (int c = 0; c < (1 << Dim); ++c) {
    const Matrix& rx = ((c >> 0) & 1) ? basis.mortar_reverse_upper() : basis.mortar_reverse_lower();
    if constexpr (Dim == 1) {
      for (int i = 0; i < n; ++i)
        for (int v = 0; v < n_vars; ++v) {
          double s = 0.0;
          for (int k = 0; k < n; ++k) s += rx(i, k) * children[c][static_cast<size_t>(k) * n_vars + v];
          parent[static_cast<size_t>(i) * n_vars + v] += s;
        }
    } else {
      const Matrix& ry = ((c >> 1) & 1) ? basis.mortar_reverse_upper()
                                        : basis.mortar_reverse_lower();
      std::vector<double> tmp(static_cast<size_t>(n) * n * n_vars, 0.0);
      for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
          for (int k = 0; k < n; ++k) {
            const double m = rx(i, k);
            const double* src = children[c] + (static_cast<size_t>(k) + static_cast<size_t>(n) * l) * n_vars;
            double* dst = tmp.data() + (static_cast<size_t>(i) + static_cast<size_t>(n) * l) * n_vars;
            for (int v = 0; v < n_vars; ++v) dst[v] += m * src[v];
          }
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double* dst = parent + (static_cast<size_t>(i) + static_cast<size_t>(n) * j) * n_vars;
          for (int l = 0; l < n; ++l) {
            const double m = ry(j, l);
            const double* src = tmp.data() + (static_cast<size_t>(i) + static_cast<size_t>(n) * l) * n_vars;
            for (int v = 0; v < n_vars; ++v) dst[v] += m * src[v];
          }
        }
    }
  }
}

} // namespace dg
} // namespace treedg

#endif
