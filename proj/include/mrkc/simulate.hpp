#pragma once

// Single-run driver: builds the grid problem from a RunConfig, estimates
// spectral radii once at t = 0, steps the selected method to t_end with a
// norm guard, and collects counters plus per-step stage plans.

#include <memory>

#include "mrkc/baselines.hpp"
#include "mrkc/config.hpp"
#include "mrkc/core.hpp"
#include "mrkc/monodomain.hpp"

namespace mrkc {

struct StepRecord {
  int s = 0;
  int m = 0;      // 0 for single-rate methods
  double eta = 0.0;
};

struct RunResult {
  Vec final_state;
  StateLayout layout;
  Grid grid;
  EvalCounters counters;
  std::vector<StepRecord> steps;  // empty for the baseline methods
  long n_steps = 0;

  double rho_F = 0.0;          // power-iteration estimate used for planning
  double rho_S = 0.0;
  double rho_F_analytic = 0.0; // closed-form diffusion value, for cross-checks
  std::vector<int> stiff_gates;  // mRKC splitting (stiffest first)

  double gate_min = 0.0;  // range observed over the whole run
  double gate_max = 1.0;

  bool aborted = false;
  long abort_step = -1;
  std::string abort_reason;
};

// Assembled problem pieces shared by the drivers.
struct SimSetup {
  std::shared_ptr<const IonicModel> model;
  std::unique_ptr<MonodomainOperator> op;
};
SimSetup build_setup(const RunConfig& cfg);

// Membrane-potential trace of a single stimulated cell (no diffusion),
// used to rank gate stiffness over an action potential.
Vec single_cell_trace(const IonicModel& model, const RunConfig& cfg);

RunResult run_simulation(const RunConfig& cfg);

// Final-state field snapshot: node, coordinates, V, then the model's
// gating/auxiliary variables. Bitwise deterministic for a given config.
void write_snapshot(const std::string& path, const RunResult& result,
                    const IonicModel& model);

}  // namespace mrkc
