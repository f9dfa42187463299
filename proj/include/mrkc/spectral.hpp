#pragma once

// Nonlinear power iteration estimating the spectral radius of a right-hand
// side's Jacobian from finite differences of f, without forming the matrix.

#include "mrkc/core.hpp"

namespace mrkc {

struct RhoEstimate {
  double rho = 0.0;   // safety-multiplied estimate [1/ms]
  Vec v;              // dominant-direction vector, for warm starts
  int iterations = 0;
  double safety = 1.05;
  bool converged = true;
};

// Estimates rho(df/dy(t, y)) by the nonlinear power iteration
//
//   delta = max(||y||, 1e-8) * 1e-8
//   z     = y + (delta/||v||) v
//   v     <- f(t, z) - f(t, y),   rho <- ||v|| / delta
//
// looping until |rho - rho_old| < 0.01 * rho or 50 iterations, then
// multiplying by the 1.05 safety factor. Pass the previous estimate's v and
// rho to warm-start; an empty v0 selects a seeded pseudo-random direction.
// A null operator (||v|| below 1e-300) yields rho = 0.
RhoEstimate estimate_spectral_radius(double t, const Vec& y, const RhsFn& f,
                                     const Vec& v0 = {}, double rho0 = 0.0);

}  // namespace mrkc
