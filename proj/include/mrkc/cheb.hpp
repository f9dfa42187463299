#pragma once

// Damped Chebyshev machinery for first-order RKC methods: stage-count
// selection, coefficient recurrences, the three-term stage iteration, and
// stability-polynomial evaluation.

#include "mrkc/core.hpp"

namespace mrkc {

inline constexpr double kDefaultDamping = 0.05;

// Coefficients of the s-stage damped RKC recurrence.
//
//   omega0 = 1 + eps/s^2,  omega1 = T_s(omega0) / T_s'(omega0)
//   b_j    = 1 / T_j(omega0)
//   mu_1   = omega1/omega0,  c_0 = 0,  c_1 = mu_1
//   mu_j   = 2 omega1 b_j / b_{j-1}
//   nu_j   = 2 omega0 b_j / b_{j-1}
//   kappa_j = -b_j / b_{j-2}
//   c_j    = nu_j c_{j-1} + kappa_j c_{j-2} + mu_j
//
// Consistency: nu_j + kappa_j = 1 and c_s = 1 (up to round-off).
struct RkcCoeffs {
  int s = 0;
  double epsilon = 0.0;
  double omega0 = 0.0;
  double omega1 = 0.0;
  Vec b;      // [0..s]
  Vec mu;     // valid at [1..s]
  Vec nu;     // valid at [2..s]
  Vec kappa;  // valid at [2..s]
  Vec c;      // [0..s], abscissae in [0,1]
};

// Stage plan: s = max(1, ceil(sqrt(dt*rho/beta))), ell = beta*s^2 with
// beta = 2 - 4/3*eps. The clamp covers dt*rho ~ 0 where the raw formula
// would give zero stages.
struct StagePlan {
  int s = 1;
  double ell = 0.0;   // stability-interval length beta*s^2
  double beta = 0.0;  // 2 - 4*eps/3
};

// First-kind Chebyshev polynomial value and derivative at x, by the
// three-term recurrence (valid for any real x, in particular x > 1).
struct ChebEval {
  double value;
  double derivative;
};
ChebEval cheb_T(int degree, double x);

StagePlan get_stages(double dt, double rho, double epsilon);

RkcCoeffs rkc_coeffs(int s, double epsilon);

// Three-term RKC stage iteration g_0..g_s over a span dt. Uses three
// state-sized work vectors regardless of s and evaluates f exactly s times.
// Throws NumericalAbort naming the stage index if a stage goes non-finite.
Vec rkc_iteration(double t, const Vec& y, double dt, const RhsFn& f,
                  const RkcCoeffs& coeffs);
Vec rkc_iteration(double t, const Vec& y, double dt, const RhsFn& f, int s,
                  double epsilon);

// One full RKC step: plan stages from (dt, rho) and run the iteration.
Vec rkc_step(double t, const Vec& y, double dt, const RhsFn& f, double rho,
             double epsilon, StagePlan* plan_out = nullptr);

// Stability polynomial R_s(z), evaluated by running the stage iteration on
// the scalar problem y' = (z/dt) y with y = 1, dt = 1.
double stability_poly(int s, double epsilon, double z);

// Phi_s(z) = (R_s(z) - 1)/z with the removable singularity at z = 0 handled
// explicitly (R_s'(0) = 1 by first-order consistency).
double stability_phi(int s, double epsilon, double z);

}  // namespace mrkc
