#pragma once

// Experiment drivers: convergence and efficiency tables against a cached
// EXEX-RL reference, effective-stability scans with a bisected explicit
// limit, and the test-equation sweep. Independent (method, dt) cells may
// run on a small thread pool; outputs are deterministic either way.

#include <span>

#include "mrkc/simulate.hpp"
#include "mrkc/stability.hpp"

namespace mrkc {

// Reference solution: EXEX-RL at dt_ref on the same physical setup, cached
// on disk under cfg.out_dir keyed by a hash of the physical configuration
// (method and probe dt excluded, so every method shares one reference).
Vec reference_solution(const RunConfig& cfg, double dt_ref,
                       std::string* cache_path = nullptr);

// min(1e-4, dt_min/20), snapped so it divides t_end.
double default_reference_dt(const RunConfig& cfg, std::span<const double> dts);

struct ConvergenceRow {
  double dt = 0.0;
  double err = 0.0;
  double order = 0.0;  // observed, between this row and the previous one
  int s = 0;
  int m = 0;
  EvalCounters counters;
  bool stable = true;
};

struct ConvergenceTable {
  Method method;
  double dt_ref = 0.0;
  std::vector<ConvergenceRow> rows;
};

ConvergenceTable run_convergence(const RunConfig& base,
                                 std::span<const double> dts);

struct StabilityRow {
  double dt = 0.0;
  double rel_norm = 0.0;  // ||V_N|| / ||V*||
  bool stable = false;
  int s = 0;
  int m = 0;
};

struct StabilityScan {
  std::vector<StabilityRow> rows;
  double dt_explicit = 0.0;  // bisected EXEX-RL stability limit
  double rho_F_analytic = 0.0;
};

StabilityScan run_effective_stability(const RunConfig& base,
                                      std::span<const double> dts);

// Largest stable EXEX-RL step, located by bisection on full runs.
double bisect_explicit_limit(const RunConfig& base);

struct EfficiencyRow {
  Method method;
  double dt = 0.0;
  double err = 0.0;
  EvalCounters counters;
  int s = 0;
  int m = 0;
  bool stable = true;
};

std::vector<EfficiencyRow> run_efficiency(const RunConfig& base,
                                          std::span<const Method> methods,
                                          std::span<const double> dts);

// CSV emission (documented column order, shortest round-trip floats).
void write_convergence_csv(const std::string& path, const ConvergenceTable& t);
void write_stability_csv(const std::string& path, const StabilityScan& s);
void write_efficiency_csv(const std::string& path,
                          std::span<const EfficiencyRow> rows);
void write_sweep_csv(const std::string& path,
                     std::span<const SweepPoint> points);

}  // namespace mrkc
