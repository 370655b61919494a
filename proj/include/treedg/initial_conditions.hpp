#ifndef TREEDG_INITIAL_CONDITIONS_HPP
#define TREEDG_INITIAL_CONDITIONS_HPP

#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "treedg/equations.hpp"
#include "treedg/errors.hpp"

namespace treedg {

// A problem setup bound to an equation set: the initial state as a function
// of (x, t), an optional source term, and whether the time-dependent field is
// an exact solution usable as the error reference.
template <class Eq>
struct Problem {
  using State = typename Eq::State;
  using Coord = std::array<double, Eq::ndims>;

  std::string name;
  std::function<State(const Coord&, double)> evaluate;
  std::function<State(double, const Coord&, const State&)> source; // may be empty
  bool has_exact_solution = false;
};

namespace ic_detail {

template <int Dim>
double coord_sum(const std::array<double, Dim>& x) {
  double s = 0.0;
  for (double xi : x) s += xi;
  return s;
}

} // namespace ic_detail

// Registry of built-in setups. Throws ConfigError for an unknown name or an
// incompatible equation set.
template <int Dim>
Problem<LinearAdvection<Dim>> make_problem(const std::string& name, const LinearAdvection<Dim>& eq) {
  using P = Problem<LinearAdvection<Dim>>;
  using Coord = typename P::Coord;
  if (name == "constant") {
    return P{name, [](const Coord&, double) { return typename P::State{1.0}; }, nullptr, true};
  }
  if (name == "convergence_test") {
    // u = 1 + 0.5 sin(pi (sum(x) - sum(a) t)); exact solution, zero source
    const double a_sum = ic_detail::coord_sum<Dim>(eq.velocity);
    return P{name,
             [a_sum](const Coord& x, double t) {
               return typename P::State{1.0 + 0.5 * std::sin(M_PI * (ic_detail::coord_sum<Dim>(x) - a_sum * t))};
             },
             nullptr, true};
  }
  throw ConfigError("initial condition '" + name + "' is not available for " +
                    LinearAdvection<Dim>::name());
}

inline Problem<Burgers1D> make_problem(const std::string& name, const Burgers1D&) {
  using P = Problem<Burgers1D>;
  using Coord = P::Coord;
  if (name == "constant") {
    return P{name, [](const Coord&, double) { return P::State{1.0}; }, nullptr, true};
  }
  if (name == "convergence_test") {
    // manufactured: u = 2 + 0.5 sin(pi (x - t)),
    // source s = 0.5 pi cos(pi (x - t)) (u - 1)
    auto field = [](const Coord& x, double t) {
      return P::State{2.0 + 0.5 * std::sin(M_PI * (x[0] - t))};
    };
    auto source = [](double t, const Coord& x, const P::State&) {
      const double phase = M_PI * (x[0] - t);
      const double u = 2.0 + 0.5 * std::sin(phase);
      return P::State{0.5 * M_PI * std::cos(phase) * (u - 1.0)};
    };
    return P{name, field, source, true};
  }
  throw ConfigError("initial condition '" + name + "' is not available for burgers_1d");
}

template <int Dim>
Problem<CompressibleEuler<Dim>> make_problem(const std::string& name,
                                             const CompressibleEuler<Dim>& eq) {
  using Eq = CompressibleEuler<Dim>;
  using P = Problem<Eq>;
  using Coord = typename P::Coord;
  using State = typename P::State;

  if (name == "constant") {
    State prim;
    prim[0] = 1.0;
    prim[1] = 0.1;
    if constexpr (Dim == 2) prim[2] = -0.2;
    prim[Eq::nvars - 1] = 10.0;
    const State u0 = eq.prim2cons(prim);
    return P{name, [u0](const Coord&, double) { return u0; }, nullptr, true};
  }

  if (name == "convergence_test") {
    // manufactured solution: rho = 2 + 0.1 sin(pi (sum(x) - t)), v_i = 1,
    // p = rho^2; the matched source was obtained by symbolic substitution
    // into the conservation law and is hard-coded below.
    const double gamma = eq.gamma;
    auto field = [eq](const Coord& x, double t) {
      const double rho = 2.0 + 0.1 * std::sin(M_PI * (ic_detail::coord_sum<Dim>(x) - t));
      State prim;
      prim[0] = rho;
      for (int j = 0; j < Dim; ++j) prim[1 + j] = 1.0;
      prim[Eq::nvars - 1] = rho * rho;
      return eq.prim2cons(prim);
    };
    auto source = [gamma](double t, const Coord& x, const State&) {
      const double phase = M_PI * (ic_detail::coord_sum<Dim>(x) - t);
      const double rho = 2.0 + 0.1 * std::sin(phase);
      const double drho = 0.1 * M_PI * std::cos(phase);
      State s{};
      if constexpr (Dim == 1) {
        s[0] = 0.0;
        s[1] = 2.0 * rho * drho;
        s[2] = 2.0 * rho * drho;
      } else {
        s[0] = drho;
        s[1] = drho * (1.0 + 2.0 * rho);
        s[2] = drho * (1.0 + 2.0 * rho);
        s[3] = drho * (1.0 + rho * (2.0 / (gamma - 1.0) + 4.0));
      }
      return s;
    };
    return P{name, field, source, true};
  }

  if (name == "density_wave") {
    // exact solution: constant velocity and pressure, advected density
    // rho = 1 + 0.5 sin(pi (sum(x) - sum(v) t)), v = (0.1[, -0.2]), p = 10
    std::array<double, Dim> vel;
    vel[0] = 0.1;
    if constexpr (Dim == 2) vel[1] = -0.2;
    const double v_sum = ic_detail::coord_sum<Dim>(vel);
    auto field = [eq, vel, v_sum](const Coord& x, double t) {
      State prim;
      prim[0] = 1.0 + 0.5 * std::sin(M_PI * (ic_detail::coord_sum<Dim>(x) - v_sum * t));
      for (int j = 0; j < Dim; ++j) prim[1 + j] = vel[j];
      prim[Eq::nvars - 1] = 10.0;
      return eq.prim2cons(prim);
    };
    return P{name, field, nullptr, true};
  }

  if constexpr (Dim == 2) {
    if (name == "kelvin_helmholtz") {
      // smooth shear layer with tanh profiles and a sine v2 perturbation,
      // on [-1,1]^2 periodic
      auto field = [eq](const Coord& x, double) {
        const double band = std::tanh(15.0 * x[1] + 7.5) - std::tanh(15.0 * x[1] - 7.5);
        State prim;
        prim[0] = 0.5 + 0.75 * band;
        prim[1] = 0.5 * (band - 1.0);
        prim[2] = 0.1 * std::sin(2.0 * M_PI * x[0]);
        prim[3] = 1.0;
        return eq.prim2cons(prim);
      };
      return P{name, field, nullptr, false};
    }
    if (name == "blast") {
      // circular blast into a near-vacuum ambient: (rho, p) jumps from
      // (1, 1e3) inside radius 0.1 to (0.1, 1e-2) outside; strong enough
      // that unlimited LGL nodal values leave the admissible set
      auto field = [eq](const Coord& x, double) {
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
        const bool inside = (r <= 0.1);
        State prim;
        prim[0] = inside ? 1.0 : 0.1;
        prim[1] = 0.0;
        prim[2] = 0.0;
        prim[3] = inside ? 1.0e3 : 1.0e-2;
        return eq.prim2cons(prim);
      };
      return P{name, field, nullptr, false};
    }
  }

  throw ConfigError("initial condition '" + name + "' is not available for " +
                    std::string(Eq::name()));
}

} // namespace treedg

#endif
