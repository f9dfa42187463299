#include "mrkc/multirate.hpp"

#include <cassert>
#include <chrono>
#include <cmath>

namespace mrkc {

namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// Counting/timing wrappers around the user callbacks.
void eval_fF(const SplitRhs& rhs, double t, const Vec& y, Vec& out) {
  if (rhs.counters) {
    const double t0 = now_s();
    rhs.f_F(t, y, out);
    rhs.counters->t_fF += now_s() - t0;
    ++rhs.counters->n_fF;
  } else {
    rhs.f_F(t, y, out);
  }
}

void eval_fS(const SplitRhs& rhs, double t, const Vec& y, Vec& out) {
  if (rhs.counters) {
    const double t0 = now_s();
    rhs.f_S(t, y, out);
    rhs.counters->t_fS += now_s() - t0;
    ++rhs.counters->n_fS;
  } else {
    rhs.f_S(t, y, out);
  }
}

}  // namespace

double phi(double z) {
  if (!std::isfinite(z)) throw std::invalid_argument("phi: non-finite input");
  if (std::abs(z) < 1e-5)
    return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0));
  return std::expm1(z) / z;
}

Vec exponential_euler_step(const Vec& y, double eta, const Vec& lambda_diag,
                           const Vec& y_inf) {
  Vec out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    assert(lambda_diag[i] <= 0.0 && "positive Lambda entry: model bug");
    // eta*phi(eta*L)*L*(y - y_inf) = (e^{eta*L} - 1)(y - y_inf)
    out[i] = y[i] + std::expm1(eta * lambda_diag[i]) * (y[i] - y_inf[i]);
  }
  return out;
}

Vec averaged_force_mrkc(double t, const Vec& y, double eta,
                        const SplitRhs& rhs, int m, double epsilon) {
  if (m < 1) throw std::invalid_argument("averaged_force_mrkc: m must be >= 1");
  const std::size_t n = y.size();

  Vec fs(n);
  eval_fS(rhs, t, y, fs);  // frozen slow term

  const RhsFn f_u = [&](double r, const Vec& u, Vec& out) {
    eval_fF(rhs, r, u, out);
    for (std::size_t i = 0; i < n; ++i) out[i] += fs[i];
  };
  Vec u_eta = rkc_iteration(t, y, eta, f_u, m, epsilon);

  for (std::size_t i = 0; i < n; ++i) u_eta[i] = (u_eta[i] - y[i]) / eta;
  return u_eta;
}

Vec averaged_force_emrkc(double t, const Vec& y, double eta,
                         const SplitRhs& rhs, int m, EmrkcVariant variant,
                         double epsilon) {
  if (m < 1)
    throw std::invalid_argument("averaged_force_emrkc: m must be >= 1");
  if (!rhs.exp_part)
    throw std::invalid_argument("averaged_force_emrkc: exp_part missing");
  const std::size_t n = y.size();

  Vec lambda(n), y_inf(n);
  double t0 = rhs.counters ? now_s() : 0.0;
  rhs.exp_part(y, lambda, y_inf);
  Vec y_E = exponential_euler_step(y, eta, lambda, y_inf);
  if (rhs.counters) {
    rhs.counters->t_exp += now_s() - t0;
    ++rhs.counters->n_exp_steps;
  }

  Vec fs(n);
  eval_fS(rhs, t, y_E, fs);  // slow term frozen at y_E

  Vec u_eta;
  if (variant == EmrkcVariant::standard) {
    const RhsFn f_u = [&](double r, const Vec& u, Vec& out) {
      eval_fF(rhs, r, u, out);
      for (std::size_t i = 0; i < n; ++i) out[i] += fs[i];
    };
    u_eta = rkc_iteration(t, y_E, eta, f_u, m, epsilon);
  } else {
    // phi(eta*Lambda) f_E(y) = (y_E - y)/eta, reusing the expm1 identity.
    Vec expc(n);
    for (std::size_t i = 0; i < n; ++i) expc[i] = (y_E[i] - y[i]) / eta;
    const RhsFn f_u = [&](double r, const Vec& u, Vec& out) {
      eval_fF(rhs, r, u, out);
      for (std::size_t i = 0; i < n; ++i) out[i] += fs[i] + expc[i];
    };
    u_eta = rkc_iteration(t, y, eta, f_u, m, epsilon);
  }

  for (std::size_t i = 0; i < n; ++i) u_eta[i] = (u_eta[i] - y[i]) / eta;
  return u_eta;
}

namespace {

struct MultiratePlan {
  StagePlan outer;
  StagePlan inner;
  double eta;
};

MultiratePlan plan_step(double dt, const SplitRhs& rhs, double epsilon) {
  MultiratePlan p;
  p.outer = get_stages(dt, rhs.rho_S, epsilon);
  p.eta = 2.0 * dt / p.outer.ell;
  p.inner = get_stages(p.eta, rhs.rho_F, epsilon);
  return p;
}

void fill_report(MultirateStepReport* report, const MultiratePlan& p,
                 const EvalCounters* before, const SplitRhs& rhs) {
  if (!report) return;
  report->s = p.outer.s;
  report->m = p.inner.s;
  report->eta = p.eta;
  report->ell_s = p.outer.ell;
  report->ell_m = p.inner.ell;
  if (rhs.counters && before) {
    report->counters = *rhs.counters;
    report->counters.n_fF -= before->n_fF;
    report->counters.n_fS -= before->n_fS;
    report->counters.n_exp_steps -= before->n_exp_steps;
    report->counters.t_fF -= before->t_fF;
    report->counters.t_fS -= before->t_fS;
    report->counters.t_exp -= before->t_exp;
  }
}

}  // namespace

Vec mrkc_step(double t, const Vec& y, double dt, const SplitRhs& rhs,
              double epsilon, MultirateStepReport* report) {
  if (dt <= 0.0) throw std::invalid_argument("mrkc_step: dt must be > 0");
  const MultiratePlan p = plan_step(dt, rhs, epsilon);
  const EvalCounters before = rhs.counters ? *rhs.counters : EvalCounters{};

  const RhsFn averaged = [&](double r, const Vec& g, Vec& out) {
    out = averaged_force_mrkc(r, g, p.eta, rhs, p.inner.s, epsilon);
  };
  Vec next = rkc_iteration(t, y, dt, averaged, p.outer.s, epsilon);

  fill_report(report, p, &before, rhs);
  return next;
}

Vec emrkc_step(double t, const Vec& y, double dt, const SplitRhs& rhs,
               double epsilon, EmrkcVariant variant,
               MultirateStepReport* report) {
  if (dt <= 0.0) throw std::invalid_argument("emrkc_step: dt must be > 0");
  if (!rhs.exp_part)
    throw std::invalid_argument("emrkc_step: exp_part missing");
  const MultiratePlan p = plan_step(dt, rhs, epsilon);
  const EvalCounters before = rhs.counters ? *rhs.counters : EvalCounters{};

  const RhsFn averaged = [&](double r, const Vec& g, Vec& out) {
    out = averaged_force_emrkc(r, g, p.eta, rhs, p.inner.s, variant, epsilon);
  };
  Vec next = rkc_iteration(t, y, dt, averaged, p.outer.s, epsilon);

  fill_report(report, p, &before, rhs);
  return next;
}

}  // namespace mrkc
