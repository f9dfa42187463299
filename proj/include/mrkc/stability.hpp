#pragma once

// Closed-form amplification factors of the multirate steppers on the scalar
// test equation y' = (lambda_F + lambda_S + lambda_E) y, plus checkers for
// the stage/eta stability conditions. Stage counts come from the same
// planner the steppers use, so these verdicts certify exactly what runs.

#include <map>
#include <span>
#include <string>

#include "mrkc/cheb.hpp"
#include "mrkc/core.hpp"

namespace mrkc {

struct TestEqParams {
  double lambda_F = 0.0;  // all <= 0 [1/ms]
  double lambda_S = 0.0;
  double lambda_E = 0.0;
  double dt = 0.0;  // [ms]
  double epsilon = kDefaultDamping;
};

struct StabilityVerdict {
  int s = 0;
  int m = 0;
  double eta = 0.0;
  double ell_s = 0.0;
  double ell_m = 0.0;
  double inner_factor = 0.0;  // d(averaged force)/dy on the test equation
  double R = 0.0;             // amplification y1/y0
  std::map<std::string, bool> condition_checks;
  bool stable = false;  // |R| <= 1 + 1e-12
};

// d(averaged force)/dy at fixed inner stage count and auxiliary span:
//   mRKC : Phi_m(eta lF) (lF + lS)
//   emRKC: Phi_m(eta lF) (lF + lS) e^{eta lE} + phi(eta lE) lE
double averaged_force_factor_mrkc(int m, double eta, double lambda_F,
                                  double lambda_S, double epsilon);
double averaged_force_factor_emrkc(int m, double eta, double lambda_F,
                                   double lambda_S, double lambda_E,
                                   double epsilon);

// Plans (s, eta, m) from the params and evaluates
// R = R_s(dt * inner_factor). Positive lambdas are rejected; the mRKC
// verdict additionally requires lambda_E = 0.
StabilityVerdict amplification_mrkc(const TestEqParams& p);
StabilityVerdict amplification_emrkc(const TestEqParams& p);

enum class Hypothesis { A, B };

// Named inequality checks for the stability conditions:
//   dt_rhoS_le_ells : dt rho_S <= ell_s
//   eta_rhoF_le_ellm: eta rho_F <= ell_m
//   eta_formula     : eta matches 6 dt/ell_s * m^2/(m^2-1) (A)
//                     or 2 dt/ell_s (B), within 1e-12
//   rhoF_ge_4rhoS   : (B only) the fast part dominates by the factor the
//                     hypothesis assumes
// Hypothesis A needs m >= 2 (its eta formula is singular at m = 1).
std::map<std::string, bool> check_conditions(int s, int m, double eta,
                                             double dt, double rho_F,
                                             double rho_S, Hypothesis h,
                                             double epsilon = kDefaultDamping);

struct SweepPoint {
  TestEqParams params;
  StabilityVerdict verdict;
};

// Cartesian sweep of the emRKC amplification over the given lambda and dt
// values (mRKC-equivalent wherever lambda_E = 0).
std::vector<SweepPoint> sweep_test_equation(std::span<const double> lambda_F,
                                            std::span<const double> lambda_S,
                                            std::span<const double> lambda_E,
                                            std::span<const double> dts,
                                            double epsilon = kDefaultDamping);

}  // namespace mrkc
