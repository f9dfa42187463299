#pragma once

// Reference integrators: IMEX-RL (implicit diffusion + Rush-Larsen ionic
// update), its fully explicit EXEX-RL variant used for reference solutions,
// and the matrix-free conjugate-gradient solver behind the implicit step.

#include "mrkc/core.hpp"
#include "mrkc/monodomain.hpp"

namespace mrkc {

struct CgConfig {
  double rel_tol = 1e-8;
  long max_iters = 0;  // 0 selects 10*sqrt(N)
  enum class Precond { none, jacobi } preconditioner = Precond::jacobi;
};

struct CgResult {
  long iterations = 0;
  bool converged = true;
  double residual = 0.0;   // final ||b - op(x)||
  long op_applies = 0;
};

using LinOp = std::function<void(const Vec&, Vec&)>;

// Preconditioned conjugate gradients on a symmetric positive definite
// operator; terminates when ||b - op(x)|| <= rel_tol * ||b||. x holds the
// initial guess on entry and the solution on exit. jacobi_diag supplies the
// operator diagonal when the jacobi preconditioner is selected.
CgResult cg_solve(const LinOp& op, const Vec& b, Vec& x, const CgConfig& cfg,
                  const Vec* jacobi_diag = nullptr);

// One IMEX-RL step:
//   1. gates     z_E <- z_E + (e^{dt Lambda(V)} - 1)(z_E - z_inf(V))
//   2. auxiliary z_S <- z_S + dt g_S(V, z_E_new, z_S)
//   3. potential solve (I - dt * diffusion) V_new = V + dt * reaction
// The linear solve runs in trapezoid-weighted coordinates, where the
// Neumann stencil is symmetric. Throws NumericalAbort if CG fails.
Vec imex_rl_step(double t, const Vec& y, double dt,
                 const MonodomainProblem& prob, const CgConfig& cfg = {},
                 EvalCounters* counters = nullptr);

// As imex_rl_step with the potential update performed explicitly; subject
// to the dt <= 2/rho_F stability bound of explicit Euler.
Vec exex_rl_step(double t, const Vec& y, double dt,
                 const MonodomainProblem& prob,
                 EvalCounters* counters = nullptr);

}  // namespace mrkc
