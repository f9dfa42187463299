#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrkc {

using Vec = std::vector<double>;

// Right-hand side callback: writes f(t, y) into out (same size as y).
using RhsFn = std::function<void(double t, const Vec& y, Vec& out)>;

// Thrown when an integration produces non-finite values or trips a norm
// guard. Carries enough metadata to report which step / stage went bad.
class NumericalAbort : public std::runtime_error {
public:
  NumericalAbort(std::string what, long step, double dt)
      : std::runtime_error(std::move(what)), step_index(step), dt(dt) {}
  long step_index = -1;
  double dt = 0.0;
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Per-run work tallies. n_fF / n_fS count actual callback invocations, so
// tests can assert the cost model (n_fS = sum s, n_fF = sum s*m) against
// what really happened rather than against bookkeeping.
struct EvalCounters {
  long long n_fF = 0;
  long long n_fS = 0;
  long long n_exp_steps = 0;
  long long n_linsolves = 0;
  long long cg_iters_total = 0;
  double wall_time = 0.0;  // seconds, stepping loop only
  double t_fF = 0.0;       // seconds inside f_F evaluations
  double t_fS = 0.0;
  double t_exp = 0.0;

  EvalCounters& operator+=(const EvalCounters& o) {
    n_fF += o.n_fF;
    n_fS += o.n_fS;
    n_exp_steps += o.n_exp_steps;
    n_linsolves += o.n_linsolves;
    cg_iters_total += o.cg_iters_total;
    wall_time += o.wall_time;
    t_fF += o.t_fF;
    t_fS += o.t_fS;
    t_exp += o.t_exp;
    return *this;
  }
};

}  // namespace mrkc
