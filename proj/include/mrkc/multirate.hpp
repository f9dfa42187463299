#pragma once

// Multirate explicit stabilized steppers (mRKC, emRKC): averaged-force
// construction via inner RKC iterations, plus the exponential Euler update
// for diagonal relaxation terms Lambda(y)(y - y_inf(y)).

#include "mrkc/cheb.hpp"
#include "mrkc/core.hpp"

namespace mrkc {

// phi(z) = (e^z - 1)/z, with a series fallback near z = 0.
double phi(double z);

// Componentwise y + (e^{eta*Lambda} - 1)(y - y_inf); exact for frozen
// linear relaxation dynamics. Entries with Lambda = 0 pass through
// unchanged. In debug builds, positive Lambda entries assert (they signal
// a model bug, not a numerical issue).
Vec exponential_euler_step(const Vec& y, double eta, const Vec& lambda_diag,
                           const Vec& y_inf);

// Split right-hand side: fast (stiff, cheap), slow (non-stiff, expensive),
// and an optional diagonal exponential part. Spectral radii are
// caller-supplied; the steppers never re-estimate them.
struct SplitRhs {
  RhsFn f_F;
  RhsFn f_S;
  // Fills lambda(y) and y_inf(y), both state-shaped. Null if the problem
  // has no exponential part.
  std::function<void(const Vec& y, Vec& lambda, Vec& y_inf)> exp_part;
  double rho_F = 0.0;
  double rho_S = 0.0;
  // Optional tallies, incremented at the actual call sites.
  EvalCounters* counters = nullptr;
};

enum class EmrkcVariant {
  standard,     // inner iteration starts from y_E
  progressive,  // exponential contribution added during the inner iteration
};

// Per-step record: stage counts, auxiliary span, stability lengths, and the
// work performed by this step.
struct MultirateStepReport {
  int s = 0;
  int m = 0;
  double eta = 0.0;
  double ell_s = 0.0;
  double ell_m = 0.0;
  EvalCounters counters;
};

// Averaged force (u_eta - y)/eta where u solves the auxiliary problem
// u' = f_F(u) + f_S(t, y) over [0, eta] from u(0) = y, approximated with an
// m-stage inner RKC iteration. Exactly 1 f_S and m f_F evaluations.
Vec averaged_force_mrkc(double t, const Vec& y, double eta,
                        const SplitRhs& rhs, int m,
                        double epsilon = kDefaultDamping);

// As above but the exponential part is advanced first: y_E by an
// exponential Euler step over eta, then the inner iteration integrates
// f_F(u) + f_S(t, y_E) from y_E (standard) or from y with the exponential
// contribution (y_E - y)/eta added to the auxiliary right-hand side
// (progressive).
Vec averaged_force_emrkc(double t, const Vec& y, double eta,
                         const SplitRhs& rhs, int m, EmrkcVariant variant,
                         double epsilon = kDefaultDamping);

// One mRKC step: plan s from (dt, rho_S), eta = 2 dt / ell_s, plan m from
// (eta, rho_F), then run the outer RKC iteration on the averaged force.
// Costs s f_S evaluations and s*m f_F evaluations.
Vec mrkc_step(double t, const Vec& y, double dt, const SplitRhs& rhs,
              double epsilon = kDefaultDamping,
              MultirateStepReport* report = nullptr);

// One emRKC step: as mrkc_step with the exponential averaged force; adds s
// exponential Euler updates.
Vec emrkc_step(double t, const Vec& y, double dt, const SplitRhs& rhs,
               double epsilon = kDefaultDamping,
               EmrkcVariant variant = EmrkcVariant::standard,
               MultirateStepReport* report = nullptr);

}  // namespace mrkc
