#ifndef TREEDG_EQUATIONS_HPP
#define TREEDG_EQUATIONS_HPP

#include <array>
#include <cmath>
#include <string>

#include "treedg/errors.hpp"

namespace treedg {

// Stable logarithmic mean (b - a) / (ln b - ln a), the key ingredient of the
// entropy-conservative Euler flux. Switches to a series in
// zeta = (b - a)/(b + a) when the arguments are close, where the direct
// formula suffers catastrophic cancellation.
inline double logmean(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw DivergenceError("logmean requires positive arguments, got a=" + std::to_string(a) +
                          " b=" + std::to_string(b));
  const double zeta = (b - a) / (b + a);
  const double z2 = zeta * zeta;
  if (z2 < 1e-4) {
    // (a+b)/2 / (1 + z^2/3 + z^4/5 + z^6/7)
    return 0.5 * (a + b) / (1.0 + z2 * (1.0 / 3.0 + z2 * (1.0 / 5.0 + z2 * (1.0 / 7.0))));
  }
  return (b - a) / (std::log(b) - std::log(a));
}

enum class FluxKind { central, lax_friedrichs, hll, ec };

inline const char* flux_kind_name(FluxKind k) {
  switch (k) {
    case FluxKind::central: return "central";
    case FluxKind::lax_friedrichs: return "lax_friedrichs";
    case FluxKind::hll: return "hll";
    case FluxKind::ec: return "ec";
  }
  return "?";
}

template <class Eq>
struct EntropyData {
  typename Eq::State w;                          // entropy variables dS/du
  double entropy;                                // mathematical entropy S
  std::array<double, Eq::ndims> psi;             // flux potentials w.f^j - q^j
};

// ---------------------------------------------------------------------------
// Linear scalar advection, u_t + a . grad(u) = 0.
// Entropy pair: S = u^2/2, w = u, q^j = a_j u^2 / 2, psi^j = a_j u^2 / 2.
// ---------------------------------------------------------------------------
template <int Dim>
struct LinearAdvection {
  static constexpr int ndims = Dim;
  static constexpr int nvars = 1;
  using State = std::array<double, 1>;

  std::array<double, Dim> velocity;

  static const char* name() { return Dim == 1 ? "linear_advection_1d" : "linear_advection_2d"; }
  static std::array<const char*, 1> variable_names() { return {"u"}; }
  static std::array<const char*, 1> primitive_names() { return {"u"}; }

  bool admissible(const State& u) const { return std::isfinite(u[0]); }
  void check_admissible(const State& u) const {
    if (!admissible(u)) throw DivergenceError("non-finite advection state");
  }

  State physical_flux(const State& u, int axis) const { return {velocity[axis] * u[0]}; }

  State cons2prim(const State& u) const { return u; }
  State prim2cons(const State& q) const { return q; }

  EntropyData<LinearAdvection> cons2entropy(const State& u) const {
    EntropyData<LinearAdvection> e;
    e.w = {u[0]};
    e.entropy = 0.5 * u[0] * u[0];
    for (int j = 0; j < Dim; ++j) e.psi[j] = 0.5 * velocity[j] * u[0] * u[0];
    return e;
  }

  double max_wave_speed(const State&, const State&, int axis) const {
    return std::abs(velocity[axis]);
  }
  void wave_speed_bounds(const State&, int axis, double& lo, double& hi) const {
    lo = hi = velocity[axis];
  }

  State ec_flux(const State& uL, const State& uR, int axis) const {
    return {velocity[axis] * 0.5 * (uL[0] + uR[0])};
  }
};

// ---------------------------------------------------------------------------
// Inviscid Burgers equation, u_t + (u^2/2)_x = 0.
// Entropy pair: S = u^2/2, w = u, q = u^3/3, psi = u^3/6.
// ---------------------------------------------------------------------------
struct Burgers1D {
  static constexpr int ndims = 1;
  static constexpr int nvars = 1;
  using State = std::array<double, 1>;

  static const char* name() { return "burgers_1d"; }
  static std::array<const char*, 1> variable_names() { return {"u"}; }
  static std::array<const char*, 1> primitive_names() { return {"u"}; }

  bool admissible(const State& u) const { return std::isfinite(u[0]); }
  void check_admissible(const State& u) const {
    if (!admissible(u)) throw DivergenceError("non-finite Burgers state");
  }

  State physical_flux(const State& u, int) const { return {0.5 * u[0] * u[0]}; }

  State cons2prim(const State& u) const { return u; }
  State prim2cons(const State& q) const { return q; }

  EntropyData<Burgers1D> cons2entropy(const State& u) const {
    EntropyData<Burgers1D> e;
    e.w = {u[0]};
    e.entropy = 0.5 * u[0] * u[0];
    e.psi[0] = u[0] * u[0] * u[0] / 6.0;
    return e;
  }

  double max_wave_speed(const State& uL, const State& uR, int) const {
    return std::max(std::abs(uL[0]), std::abs(uR[0]));
  }
  void wave_speed_bounds(const State& u, int, double& lo, double& hi) const { lo = hi = u[0]; }

  State ec_flux(const State& uL, const State& uR, int) const {
    // summands grouped so the result is bit-exact under argument swap
    return {((uL[0] * uL[0] + uR[0] * uR[0]) + uL[0] * uR[0]) / 6.0};
  }
};

// ---------------------------------------------------------------------------
// Compressible Euler equations for an ideal gas.
// 1D state (rho, rho v, E), 2D state (rho, rho v1, rho v2, E), with
// p = (gamma - 1)(E - rho |v|^2 / 2).
// Entropy pair: S = -rho s / (gamma - 1), s = ln p - gamma ln rho,
// q^j = v_j S, psi^j = rho v_j.
// ---------------------------------------------------------------------------
template <int Dim>
struct CompressibleEuler {
  static constexpr int ndims = Dim;
  static constexpr int nvars = Dim + 2;
  using State = std::array<double, nvars>;

  double gamma = 1.4;

  static const char* name() { return Dim == 1 ? "euler_1d" : "euler_2d"; }
  static std::array<const char*, nvars> variable_names() {
    if constexpr (Dim == 1) return {"rho", "rho_v1", "E"};
    else return {"rho", "rho_v1", "rho_v2", "E"};
  }
  static std::array<const char*, nvars> primitive_names() {
    if constexpr (Dim == 1) return {"rho", "v1", "p"};
    else return {"rho", "v1", "v2", "p"};
  }

  double pressure(const State& u) const {
    double kinetic = 0.0;
    for (int j = 0; j < Dim; ++j) kinetic += u[1 + j] * u[1 + j];
    kinetic *= 0.5 / u[0];
    return (gamma - 1.0) * (u[nvars - 1] - kinetic);
  }

  bool admissible(const State& u) const {
    for (double v : u)
      if (!std::isfinite(v)) return false;
    return u[0] > 0.0 && pressure(u) > 0.0;
  }

  void check_admissible(const State& u) const {
    if (!admissible(u))
      throw DivergenceError("inadmissible Euler state: rho=" + std::to_string(u[0]) +
                            " p=" + std::to_string(pressure(u)));
  }

  State physical_flux(const State& u, int axis) const {
    check_admissible(u);
    const double p = pressure(u);
    const double vn = u[1 + axis] / u[0];
    State f;
    f[0] = u[1 + axis];
    for (int j = 0; j < Dim; ++j) f[1 + j] = u[1 + j] * vn;
    f[1 + axis] += p;
    f[nvars - 1] = vn * (u[nvars - 1] + p);
    return f;
  }

  // primitives: (rho, v..., p)
  State cons2prim(const State& u) const {
    check_admissible(u);
    State q;
    q[0] = u[0];
    for (int j = 0; j < Dim; ++j) q[1 + j] = u[1 + j] / u[0];
    q[nvars - 1] = pressure(u);
    return q;
  }

  State prim2cons(const State& q) const {
    if (!(q[0] > 0.0) || !(q[nvars - 1] > 0.0))
      throw DivergenceError("inadmissible Euler primitives: rho=" + std::to_string(q[0]) +
                            " p=" + std::to_string(q[nvars - 1]));
    State u;
    u[0] = q[0];
    double vsq = 0.0;
    for (int j = 0; j < Dim; ++j) {
      u[1 + j] = q[0] * q[1 + j];
      vsq += q[1 + j] * q[1 + j];
    }
    u[nvars - 1] = q[nvars - 1] / (gamma - 1.0) + 0.5 * q[0] * vsq;
    return u;
  }

  EntropyData<CompressibleEuler> cons2entropy(const State& u) const {
    const State q = cons2prim(u);
    const double rho = q[0], p = q[nvars - 1];
    const double s = std::log(p) - gamma * std::log(rho);
    double vsq = 0.0;
    for (int j = 0; j < Dim; ++j) vsq += q[1 + j] * q[1 + j];
    EntropyData<CompressibleEuler> e;
    e.entropy = -rho * s / (gamma - 1.0);
    e.w[0] = (gamma - s) / (gamma - 1.0) - 0.5 * rho * vsq / p;
    for (int j = 0; j < Dim; ++j) e.w[1 + j] = rho * q[1 + j] / p;
    e.w[nvars - 1] = -rho / p;
    for (int j = 0; j < Dim; ++j) e.psi[j] = rho * q[1 + j];
    return e;
  }

  double sound_speed(const State& u) const { return std::sqrt(gamma * pressure(u) / u[0]); }

  double max_wave_speed(const State& uL, const State& uR, int axis) const {
    check_admissible(uL);
    check_admissible(uR);
    const double vL = std::abs(uL[1 + axis] / uL[0]) + sound_speed(uL);
    const double vR = std::abs(uR[1 + axis] / uR[0]) + sound_speed(uR);
    return std::max(vL, vR);
  }

  void wave_speed_bounds(const State& u, int axis, double& lo, double& hi) const {
    const double v = u[1 + axis] / u[0];
    const double c = sound_speed(u);
    lo = v - c;
    hi = v + c;
  }

  // Kinetic-energy-preserving entropy-conservative two-point flux, built from
  // the logarithmic density mean, arithmetic velocity/pressure means, the
  // averaged product of left/right velocities, and 1/logmean(rho/p) for the
  // internal energy. The Tadmor jump condition is pinned by property tests.
  State ec_flux(const State& uL, const State& uR, int axis) const {
    const State qL = cons2prim(uL);
    const State qR = cons2prim(uR);
    const double rho_mean = logmean(qL[0], qR[0]);
    const double pL = qL[nvars - 1], pR = qR[nvars - 1];
    const double inv_rho_p_mean = 1.0 / logmean(qL[0] / pL, qR[0] / pR);
    std::array<double, Dim> v_avg;
    double vv_avg = 0.0;
    for (int j = 0; j < Dim; ++j) {
      v_avg[j] = 0.5 * (qL[1 + j] + qR[1 + j]);
      vv_avg += 0.5 * (qL[1 + j] * qR[1 + j]);
    }
    const double p_avg = 0.5 * (pL + pR);
    State f;
    f[0] = rho_mean * v_avg[axis];
    for (int j = 0; j < Dim; ++j) f[1 + j] = f[0] * v_avg[j];
    f[1 + axis] += p_avg;
    f[nvars - 1] = f[0] * (vv_avg + inv_rho_p_mean / (gamma - 1.0)) +
                   0.5 * (pL * qR[1 + axis] + pR * qL[1 + axis]);
    return f;
  }
};

using LinearAdvection1D = LinearAdvection<1>;
using LinearAdvection2D = LinearAdvection<2>;
using CompressibleEuler1D = CompressibleEuler<1>;
using CompressibleEuler2D = CompressibleEuler<2>;

// ---------------------------------------------------------------------------
// Two-point numerical fluxes. All are consistent: F(u, u, axis) = f(u, axis).
// Symmetric fluxes (central, ec) evaluate averages as (L + R) * 0.5 so that
// swapping the arguments is bit-exact.
// ---------------------------------------------------------------------------

template <class Eq>
typename Eq::State flux_central(const Eq& eq, const typename Eq::State& uL,
                                const typename Eq::State& uR, int axis) {
  const auto fL = eq.physical_flux(uL, axis);
  const auto fR = eq.physical_flux(uR, axis);
  typename Eq::State f;
  for (int v = 0; v < Eq::nvars; ++v) f[v] = (fL[v] + fR[v]) * 0.5;
  return f;
}

template <class Eq>
typename Eq::State flux_lax_friedrichs(const Eq& eq, const typename Eq::State& uL,
                                       const typename Eq::State& uR, int axis) {
  const auto fL = eq.physical_flux(uL, axis);
  const auto fR = eq.physical_flux(uR, axis);
  const double lambda = eq.max_wave_speed(uL, uR, axis);
  typename Eq::State f;
  for (int v = 0; v < Eq::nvars; ++v)
    f[v] = 0.5 * (fL[v] + fR[v]) - 0.5 * lambda * (uR[v] - uL[v]);
  return f;
}

// HLL with simple two-state wave speed estimates:
//   S_L = min(lambda_min(uL), lambda_min(uR)) clipped to <= 0,
//   S_R = max(lambda_max(uL), lambda_max(uR)) clipped to >= 0.
template <class Eq>
typename Eq::State flux_hll(const Eq& eq, const typename Eq::State& uL,
                            const typename Eq::State& uR, int axis) {
  double loL, hiL, loR, hiR;
  eq.check_admissible(uL);
  eq.check_admissible(uR);
  eq.wave_speed_bounds(uL, axis, loL, hiL);
  eq.wave_speed_bounds(uR, axis, loR, hiR);
  double sL = std::min(loL, loR);
  double sR = std::max(hiL, hiR);
  if (sL >= 0.0) return eq.physical_flux(uL, axis);
  if (sR <= 0.0) return eq.physical_flux(uR, axis);
  if (sR - sL < 1e-14) return flux_central(eq, uL, uR, axis);
  const auto fL = eq.physical_flux(uL, axis);
  const auto fR = eq.physical_flux(uR, axis);
  typename Eq::State f;
  for (int v = 0; v < Eq::nvars; ++v)
    f[v] = (sR * fL[v] - sL * fR[v] + sL * sR * (uR[v] - uL[v])) / (sR - sL);
  return f;
}

template <class Eq>
typename Eq::State flux_ec(const Eq& eq, const typename Eq::State& uL,
                           const typename Eq::State& uR, int axis) {
  eq.check_admissible(uL);
  eq.check_admissible(uR);
  return eq.ec_flux(uL, uR, axis);
}

template <class Eq>
typename Eq::State numerical_flux(FluxKind kind, const Eq& eq, const typename Eq::State& uL,
                                  const typename Eq::State& uR, int axis) {
  switch (kind) {
    case FluxKind::central: return flux_central(eq, uL, uR, axis);
    case FluxKind::lax_friedrichs: return flux_lax_friedrichs(eq, uL, uR, axis);
    case FluxKind::hll: return flux_hll(eq, uL, uR, axis);
    case FluxKind::ec: return flux_ec(eq, uL, uR, axis);
  }
  throw ConfigError("unknown flux kind");
}

} // namespace treedg

#endif
