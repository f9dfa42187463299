#include "mrkc/cheb.hpp"

#include <cmath>
#include <utility>

namespace mrkc {

ChebEval cheb_T(int degree, double x) {
  if (degree < 0) throw std::invalid_argument("cheb_T: degree must be >= 0");
  // Values and derivatives propagated jointly so x > 1 needs no branch.
  double tm1 = 1.0, dm1 = 0.0;  // T_0, T_0'
  if (degree == 0) return {tm1, dm1};
  double t = x, d = 1.0;  // T_1, T_1'
  for (int j = 2; j <= degree; ++j) {
    const double tj = 2.0 * x * t - tm1;
    const double dj = 2.0 * t + 2.0 * x * d - dm1;
    tm1 = t;
    dm1 = d;
    t = tj;
    d = dj;
  }
  return {t, d};
}

StagePlan get_stages(double dt, double rho, double epsilon) {
  if (!std::isfinite(dt) || !std::isfinite(rho) || !std::isfinite(epsilon))
    throw std::invalid_argument("get_stages: non-finite input");
  if (dt <= 0.0) throw std::invalid_argument("get_stages: dt must be > 0");
  if (rho < 0.0) throw std::invalid_argument("get_stages: rho must be >= 0");
  if (epsilon < 0.0 || epsilon >= 1.5)
    throw std::invalid_argument("get_stages: damping must be in [0, 1.5)");

  StagePlan plan;
  plan.beta = 2.0 - 4.0 * epsilon / 3.0;
  const int s = static_cast<int>(std::ceil(std::sqrt(dt * rho / plan.beta)));
  plan.s = std::max(1, s);
  plan.ell = plan.beta * static_cast<double>(plan.s) * plan.s;
  return plan;
}

RkcCoeffs rkc_coeffs(int s, double epsilon) {
  if (s < 1) throw std::invalid_argument("rkc_coeffs: s must be >= 1");

  RkcCoeffs k;
  k.s = s;
  k.epsilon = epsilon;
  k.omega0 = 1.0 + epsilon / (static_cast<double>(s) * s);
  const ChebEval ts = cheb_T(s, k.omega0);
  k.omega1 = ts.value / ts.derivative;

  k.b.assign(s + 1, 0.0);
  for (int j = 0; j <= s; ++j) k.b[j] = 1.0 / cheb_T(j, k.omega0).value;

  k.mu.assign(s + 1, 0.0);
  k.nu.assign(s + 1, 0.0);
  k.kappa.assign(s + 1, 0.0);
  k.c.assign(s + 1, 0.0);

  k.mu[1] = k.omega1 / k.omega0;
  k.c[0] = 0.0;
  k.c[1] = k.mu[1];
  for (int j = 2; j <= s; ++j) {
    k.mu[j] = 2.0 * k.omega1 * k.b[j] / k.b[j - 1];
    k.nu[j] = 2.0 * k.omega0 * k.b[j] / k.b[j - 1];
    k.kappa[j] = -k.b[j] / k.b[j - 2];
    k.c[j] = k.nu[j] * k.c[j - 1] + k.kappa[j] * k.c[j - 2] + k.mu[j];
  }
  return k;
}

namespace {

void check_stage_finite(const Vec& g, int stage) {
  for (double v : g) {
    if (!std::isfinite(v))
      throw NumericalAbort(
          "rkc_iteration: non-finite value at stage " + std::to_string(stage),
          -1, 0.0);
  }
}

}  // namespace

Vec rkc_iteration(double t, const Vec& y, double dt, const RhsFn& f,
                  const RkcCoeffs& k) {
  const std::size_t n = y.size();
  Vec fbuf(n);

  // g_1 = g_0 + mu_1 dt f(t, g_0)
  f(t, y, fbuf);
  Vec gm2 = y;  // g_0
  Vec gm1(n);   // g_1
  for (std::size_t i = 0; i < n; ++i) gm1[i] = y[i] + k.mu[1] * dt * fbuf[i];
  check_stage_finite(gm1, 1);

  for (int j = 2; j <= k.s; ++j) {
    f(t + k.c[j - 1] * dt, gm1, fbuf);
    // Overwrite g_{j-2} with g_j, then rotate; three work vectors total.
    for (std::size_t i = 0; i < n; ++i)
      gm2[i] = k.nu[j] * gm1[i] + k.kappa[j] * gm2[i] + k.mu[j] * dt * fbuf[i];
    std::swap(gm1, gm2);
    check_stage_finite(gm1, j);
  }
  return gm1;
}

Vec rkc_iteration(double t, const Vec& y, double dt, const RhsFn& f, int s,
                  double epsilon) {
  return rkc_iteration(t, y, dt, f, rkc_coeffs(s, epsilon));
}

Vec rkc_step(double t, const Vec& y, double dt, const RhsFn& f, double rho,
             double epsilon, StagePlan* plan_out) {
  const StagePlan plan = get_stages(dt, rho, epsilon);
  if (plan_out) *plan_out = plan;
  return rkc_iteration(t, y, dt, f, plan.s, epsilon);
}

double stability_poly(int s, double epsilon, double z) {
  const RhsFn f = [z](double, const Vec& u, Vec& out) { out[0] = z * u[0]; };
  const Vec y{1.0};
  return rkc_iteration(0.0, y, 1.0, f, s, epsilon)[0];
}

double stability_phi(int s, double epsilon, double z) {
  if (std::abs(z) < 1e-8) {
    // (R_s(z)-1)/z -> 1 + R_s''(0)/2 * z near the removable singularity;
    // estimate R_s''(0) by central differences at a stable h.
    const double h = 1e-5;
    const double rpp = (stability_poly(s, epsilon, h) - 2.0 +
                        stability_poly(s, epsilon, -h)) /
                       (h * h);
    return 1.0 + 0.5 * rpp * z;
  }
  return (stability_poly(s, epsilon, z) - 1.0) / z;
}

}  // namespace mrkc
