#ifndef TREEDG_TREEDG_HPP
#define TREEDG_TREEDG_HPP

// Umbrella header for the treedg library: adaptive high-order discontinuous
// Galerkin spectral element solvers for hyperbolic conservation laws in 1D/2D
// on Cartesian tree meshes.

#include "treedg/basis.hpp"
#include "treedg/config.hpp"
#include "treedg/dg.hpp"
#include "treedg/equations.hpp"
#include "treedg/errors.hpp"
#include "treedg/initial_conditions.hpp"
#include "treedg/mesh.hpp"
#include "treedg/output.hpp"
#include "treedg/run.hpp"
#include "treedg/semi.hpp"
#include "treedg/state.hpp"
#include "treedg/timeint.hpp"
#include "treedg/version.hpp"

#endif
