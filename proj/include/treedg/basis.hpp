#ifndef TREEDG_BASIS_HPP
#define TREEDG_BASIS_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "treedg/errors.hpp"

namespace treedg {

// Square matrix in row-major storage, sized at runtime. Only what the DG
// operators need; heavier linear algebra is intentionally absent.
class Matrix {
public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {}

  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

namespace detail {

// Legendre polynomial P_n and derivative P'_n by the three-term recurrence.
inline void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, dp0 = 0.0;
  if (n == 0) { p = p0; dp = dp0; return; }
  double p1 = x, dp1 = 1.0;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    const double dp2 = dp0 + (2 * k - 1) * p1;
    p0 = p1; dp0 = dp1;
    p1 = p2; dp1 = dp2;
  }
  p = p1; dp = dp1;
}

inline double legendre_value(int n, double x) {
  double p, dp;
  legendre(n, x, p, dp);
  return p;
}

inline std::vector<double> barycentric_weights(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> w(n, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) w[i] /= (x[i] - x[j]);
  return w;
}

// Values of all Lagrange basis polynomials (nodes x) at point t.
inline std::vector<double> lagrange_values(const std::vector<double>& x,
                                           const std::vector<double>& wb, double t) {
  const int n = static_cast<int>(x.size());
  std::vector<double> ell(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (std::abs(t - x[i]) < 1e-14) { ell[i] = 1.0; return ell; }
  }
  double denom = 0.0;
  for (int i = 0; i < n; ++i) denom += wb[i] / (t - x[i]);
  for (int i = 0; i < n; ++i) ell[i] = (wb[i] / (t - x[i])) / denom;
  return ell;
}

// Gauss-Legendre nodes/weights (roots of P_n). Used only to assemble the
// mortar/coarsening projection, where degree-2N products must be integrated
// exactly.
inline void gauss_nodes_weights(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double xi = -std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p, dp;
    for (int it = 0; it < 100; ++it) {
      legendre(n, xi, p, dp);
      const double dx = -p / dp;
      xi += dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre(n, xi, p, dp);
    x[i] = xi;
    w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
  // enforce symmetry exactly
  for (int i = 0; i < n / 2; ++i) {
    const double xm = 0.5 * (x[i] - x[n - 1 - i]);
    x[i] = xm;
    x[n - 1 - i] = -xm;
    const double wm = 0.5 * (w[i] + w[n - 1 - i]);
    w[i] = w[n - 1 - i] = wm;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

} // namespace detail

// Legendre-Gauss-Lobatto collocation basis of degree N on [-1,1], with the
// SBP differentiation matrix and the mortar projection operators used to
// couple non-conforming faces and to transfer solutions under AMR.
//
//   nodes/weights:  LGL quadrature, Sum(w) = 2, xi_0 = -1, xi_N = 1
//   deriv:          D_ij, exact on polynomials of degree <= N
//   Q = diag(w) D satisfies Q + Q^T = diag(-1, 0, ..., 0, 1)
//   mortar_forward_lower/upper  (P): interpolate a face polynomial to the
//                   nodes of the lower/upper child face
//   mortar_reverse_lower/upper  (R): L2-project child data back; satisfies
//                   R_l P_l + R_u P_u = I and w^T R = w^T/2 (conservation)
class LglBasis {
public:
  explicit LglBasis(int polydeg) : polydeg_(polydeg) {
    if (polydeg < 1 || polydeg > 20)
      throw ConfigError("polydeg must be in [1, 20], got " + std::to_string(polydeg));
    compute_nodes_weights();
    compute_derivative();
    compute_mortar_operators();
  }

  int polydeg() const { return polydeg_; }
  int n_nodes() const { return polydeg_ + 1; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& inv_weights() const { return inv_weights_; }
  const std::vector<double>& barycentric() const { return wbary_; }
  const Matrix& deriv() const { return deriv_; }

  const Matrix& mortar_forward_lower() const { return fwd_lower_; }
  const Matrix& mortar_forward_upper() const { return fwd_upper_; }
  const Matrix& mortar_reverse_lower() const { return rev_lower_; }
  const Matrix& mortar_reverse_upper() const { return rev_upper_; }

  // Interpolate nodal values to an arbitrary reference point in [-1,1].
  double interpolate(const std::vector<double>& ell, const double* values, int stride) const {
    double s = 0.0;
    for (int i = 0; i < n_nodes(); ++i) s += ell[i] * values[static_cast<size_t>(i) * stride];
    return s;
  }

  std::vector<double> lagrange_at(double t) const {
    return detail::lagrange_values(nodes_, wbary_, t);
  }

  // Nodal -> Legendre modal coefficients via the discrete (LGL) projection.
  // Exact for the interpolant; used by the troubled-cell indicator.
  void nodal_to_modal(const double* nodal, double* modal) const {
    const int n = n_nodes();
    for (int k = 0; k < n; ++k) {
      double num = 0.0;
      for (int i = 0; i < n; ++i) num += weights_[i] * nodal[i] * legendre_vals_(i, k);
      modal[k] = num / gamma_[k];
    }
  }

private:
  void compute_nodes_weights() {
    const int N = polydeg_;
    nodes_.assign(N + 1, 0.0);
    weights_.assign(N + 1, 0.0);
    nodes_[0] = -1.0;
    nodes_[N] = 1.0;
    // interior nodes: roots of P'_N, Newton from Chebyshev-Lobatto guesses
    for (int j = 1; j < N; ++j) {
      double x = -std::cos(M_PI * j / N);
      bool converged = false;
      for (int it = 0; it < 100; ++it) {
        double p, dp;
        detail::legendre(N, x, p, dp);
        const double ddp = (2.0 * x * dp - N * (N + 1) * p) / (1.0 - x * x);
        const double dx = -dp / ddp;
        x += dx;
        if (std::abs(dx) < 1e-15) { converged = true; break; }
      }
      if (!converged)
        throw std::runtime_error("LGL node Newton iteration failed for N=" + std::to_string(N));
      nodes_[j] = x;
    }
    for (int j = 0; j <= N / 2; ++j) {
      const double xm = 0.5 * (nodes_[j] - nodes_[N - j]);
      nodes_[j] = xm;
      nodes_[N - j] = -xm;
    }
    if (N % 2 == 0) nodes_[N / 2] = 0.0;
    for (int j = 0; j <= N; ++j) {
      const double pn = detail::legendre_value(N, nodes_[j]);
      weights_[j] = 2.0 / (N * (N + 1) * pn * pn);
    }
    inv_weights_.assign(N + 1, 0.0);
    for (int j = 0; j <= N; ++j) inv_weights_[j] = 1.0 / weights_[j];
    wbary_ = detail::barycentric_weights(nodes_);

    legendre_vals_ = Matrix(N + 1, N + 1);
    for (int i = 0; i <= N; ++i)
      for (int k = 0; k <= N; ++k) legendre_vals_(i, k) = detail::legendre_value(k, nodes_[i]);
    // discrete norms: exact 2/(2k+1) below the top mode, 2/N at the top
    gamma_.assign(N + 1, 0.0);
    for (int k = 0; k < N; ++k) gamma_[k] = 2.0 / (2 * k + 1);
    gamma_[N] = 2.0 / N;
  }

  void compute_derivative() {
    const int n = n_nodes();
    deriv_ = Matrix(n, n);
    for (int i = 0; i < n; ++i) {
      double diag = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        deriv_(i, j) = (wbary_[j] / wbary_[i]) / (nodes_[i] - nodes_[j]);
        diag -= deriv_(i, j);
      }
      deriv_(i, i) = diag;
    }
  }

  void compute_mortar_operators() {
    const int n = n_nodes();
    fwd_lower_ = Matrix(n, n);
    fwd_upper_ = Matrix(n, n);
    for (int i = 0; i < n; ++i) {
      const auto lo = detail::lagrange_values(nodes_, wbary_, 0.5 * (nodes_[i] - 1.0));
      const auto up = detail::lagrange_values(nodes_, wbary_, 0.5 * (nodes_[i] + 1.0));
      for (int j = 0; j < n; ++j) {
        fwd_lower_(i, j) = lo[j];
        fwd_upper_(i, j) = up[j];
      }
    }
    // Reverse: exact L2 projection of half-interval data onto degree-N
    // Legendre modes, assembled with Gauss quadrature (degree-2N integrands).
    std::vector<double> gx, gw;
    detail::gauss_nodes_weights(n, gx, gw);
    std::vector<std::vector<double>> ell_at_gauss(n);
    for (int q = 0; q < n; ++q) ell_at_gauss[q] = detail::lagrange_values(nodes_, wbary_, gx[q]);

    rev_lower_ = Matrix(n, n);
    rev_upper_ = Matrix(n, n);
    for (int half = 0; half < 2; ++half) {
      Matrix& rev = (half == 0) ? rev_lower_ : rev_upper_;
      const double shift = (half == 0) ? -1.0 : 1.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          double sum = 0.0;
          for (int k = 0; k < n; ++k) {
            double integral = 0.0;
            for (int q = 0; q < n; ++q) {
              const double eta = 0.5 * (gx[q] + shift); // child -> parent coordinate
              integral += gw[q] * detail::legendre_value(k, eta) * ell_at_gauss[q][j];
            }
            sum += legendre_vals_(i, k) * (2 * k + 1) * 0.25 * integral;
          }
          rev(i, j) = sum;
        }
      }
    }
  }

  int polydeg_;
  std::vector<double> nodes_, weights_, inv_weights_, wbary_, gamma_;
  Matrix deriv_;
  Matrix legendre_vals_;
  Matrix fwd_lower_, fwd_upper_, rev_lower_, rev_upper_;
};

} // namespace treedg

#endif
