#include "mrkc/stability.hpp"

#include <cmath>

#include "mrkc/multirate.hpp"

namespace mrkc {

namespace {

void require_nonpositive(const TestEqParams& p) {
  if (p.lambda_F > 0.0 || p.lambda_S > 0.0 || p.lambda_E > 0.0)
    throw std::invalid_argument(
        "amplification: positive lambda is outside the theory's domain");
  if (!(p.dt > 0.0)) throw std::invalid_argument("amplification: dt must be > 0");
}

struct Plan {
  StagePlan outer;
  StagePlan inner;
  double eta;
};

Plan plan_from(const TestEqParams& p) {
  Plan plan;
  plan.outer = get_stages(p.dt, std::abs(p.lambda_S), p.epsilon);
  plan.eta = 2.0 * p.dt / plan.outer.ell;
  plan.inner = get_stages(plan.eta, std::abs(p.lambda_F), p.epsilon);
  return plan;
}

StabilityVerdict build_verdict(const TestEqParams& p, const Plan& plan,
                               double inner_factor) {
  StabilityVerdict v;
  v.s = plan.outer.s;
  v.m = plan.inner.s;
  v.eta = plan.eta;
  v.ell_s = plan.outer.ell;
  v.ell_m = plan.inner.ell;
  v.inner_factor = inner_factor;
  v.R = stability_poly(v.s, p.epsilon, p.dt * inner_factor);
  v.stable = std::abs(v.R) <= 1.0 + 1e-12;

  const double z = p.dt * inner_factor;
  v.condition_checks = check_conditions(v.s, v.m, v.eta, p.dt,
                                        std::abs(p.lambda_F),
                                        std::abs(p.lambda_S), Hypothesis::B,
                                        p.epsilon);
  v.condition_checks["raw_bracket"] = (-v.ell_s <= z) && (z <= 0.0);
  return v;
}

}  // namespace

double averaged_force_factor_mrkc(int m, double eta, double lambda_F,
                                  double lambda_S, double epsilon) {
  return stability_phi(m, epsilon, eta * lambda_F) * (lambda_F + lambda_S);
}

double averaged_force_factor_emrkc(int m, double eta, double lambda_F,
                                   double lambda_S, double lambda_E,
                                   double epsilon) {
  return averaged_force_factor_mrkc(m, eta, lambda_F, lambda_S, epsilon) *
             std::exp(eta * lambda_E) +
         phi(eta * lambda_E) * lambda_E;
}

StabilityVerdict amplification_mrkc(const TestEqParams& p) {
  require_nonpositive(p);
  if (p.lambda_E != 0.0)
    throw std::invalid_argument(
        "amplification_mrkc: lambda_E must be 0 (use amplification_emrkc)");
  const Plan plan = plan_from(p);
  return build_verdict(p, plan,
                       averaged_force_factor_mrkc(plan.inner.s, plan.eta,
                                                  p.lambda_F, p.lambda_S,
                                                  p.epsilon));
}

StabilityVerdict amplification_emrkc(const TestEqParams& p) {
  require_nonpositive(p);
  const Plan plan = plan_from(p);
  return build_verdict(p, plan,
                       averaged_force_factor_emrkc(plan.inner.s, plan.eta,
                                                   p.lambda_F, p.lambda_S,
                                                   p.lambda_E, p.epsilon));
}

std::map<std::string, bool> check_conditions(int s, int m, double eta,
                                             double dt, double rho_F,
                                             double rho_S, Hypothesis h,
                                             double epsilon) {
  const double beta = 2.0 - 4.0 * epsilon / 3.0;
  const double ell_s = beta * static_cast<double>(s) * s;
  const double ell_m = beta * static_cast<double>(m) * m;

  std::map<std::string, bool> checks;
  checks["dt_rhoS_le_ells"] = dt * rho_S <= ell_s;
  checks["eta_rhoF_le_ellm"] = eta * rho_F <= ell_m;

  double eta_expected;
  if (h == Hypothesis::A) {
    if (m < 2)
      throw std::invalid_argument(
          "check_conditions: hypothesis A needs m >= 2 (eta formula has "
          "m^2/(m^2-1))");
    const double m2 = static_cast<double>(m) * m;
    eta_expected = 6.0 * dt / ell_s * m2 / (m2 - 1.0);
  } else {
    eta_expected = 2.0 * dt / ell_s;
    // The hypothesis assumes the fast part dominates; in magnitudes this
    // reads rho_F >= 4 rho_S.
    checks["rhoF_ge_4rhoS"] = rho_F >= 4.0 * rho_S;
  }
  checks["eta_formula"] =
      std::abs(eta - eta_expected) <= 1e-12 * std::max(1.0, eta_expected);
  return checks;
}

std::vector<SweepPoint> sweep_test_equation(std::span<const double> lambda_F,
                                            std::span<const double> lambda_S,
                                            std::span<const double> lambda_E,
                                            std::span<const double> dts,
                                            double epsilon) {
  std::vector<SweepPoint> out;
  out.reserve(lambda_F.size() * lambda_S.size() * lambda_E.size() * dts.size());
  for (double lF : lambda_F)
    for (double lS : lambda_S)
      for (double lE : lambda_E)
        for (double dt : dts) {
          SweepPoint pt;
          pt.params = TestEqParams{lF, lS, lE, dt, epsilon};
          pt.verdict = amplification_emrkc(pt.params);
          out.push_back(std::move(pt));
        }
  return out;
}

}  // namespace mrkc
