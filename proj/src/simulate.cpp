#include "mrkc/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "mrkc/csv.hpp"
#include "mrkc/multirate.hpp"
#include "mrkc/spectral.hpp"

namespace mrkc {

SimSetup build_setup(const RunConfig& cfg) {
  validate(cfg);
  SimSetup setup;
  setup.model = make_ionic_model(cfg.model);

  const Grid grid = make_grid(cfg.dim, cfg.extent, cfg.dx);
  StimulusProtocol stim;
  stim.chi_amplitude = cfg.stim_amplitude;
  stim.box_lo = cfg.stim_lo;
  stim.box_hi = cfg.stim_hi;
  stim.t_start = cfg.stim_t0;
  stim.t_end = cfg.stim_t1;

  setup.op = std::make_unique<MonodomainOperator>(grid, Conductivity::defaults(),
                                                  setup.model, stim);
  return setup;
}

Vec single_cell_trace(const IonicModel& model, const RunConfig& cfg) {
  const int ng = model.n_gates();
  const IonicModel::Rest rest = model.resting_state();
  double V = rest.V;
  Vec z = rest.z_E;
  Vec zs = rest.z_S;
  zs.resize(model.n_aux(), 0.0);

  const Conductivity cond = Conductivity::defaults();
  const double dt = 0.01;
  const double t_end = std::min(cfg.t_end, 50.0);
  const double stim_rate = cfg.stim_amplitude / (cond.chi * cond.C_m);

  Vec lam(ng), zinf(ng), gs(model.n_aux());
  Vec trace;
  trace.reserve(static_cast<std::size_t>(t_end / dt) + 1);
  trace.push_back(V);
  for (double t = 0.0; t < t_end - 0.5 * dt; t += dt) {
    model.gate_coeffs(V, lam, zinf);
    for (int g = 0; g < ng; ++g)
      z[g] += std::expm1(dt * lam[g]) * (z[g] - zinf[g]);
    if (model.n_aux() > 0) {
      model.aux_rates(V, z, zs, gs);
      for (int a = 0; a < model.n_aux(); ++a) zs[a] += dt * gs[a];
    }
    const double stim = (t >= cfg.stim_t0 && t <= cfg.stim_t1) ? stim_rate : 0.0;
    V += dt * (stim - model.ionic_current(V, z, zs) / cond.C_m);
    trace.push_back(V);
  }
  return trace;
}

namespace {

double max_abs_v(const Vec& y, const StateLayout& lay) {
  double m = 0.0;
  for (long i = 0; i < lay.n_nodes; ++i) {
    if (!std::isfinite(y[i])) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(y[i]));
  }
  return m;
}

void track_gate_range(const Vec& y, const StateLayout& lay, double& lo,
                      double& hi) {
  if (lay.n_gates == 0) return;
  const long begin = lay.gate_offset(0);
  const long end = begin + static_cast<long>(lay.n_gates) * lay.n_nodes;
  for (long k = begin; k < end; ++k) {
    lo = std::min(lo, y[k]);
    hi = std::max(hi, y[k]);
  }
}

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

RunResult run_simulation(const RunConfig& cfg) {
  SimSetup setup = build_setup(cfg);
  const MonodomainOperator& op = *setup.op;
  const IonicModel& model = *setup.model;
  const StateLayout& lay = op.layout();

  if ((cfg.method == Method::emrkc || cfg.method == Method::emrkc_progressive) &&
      model.n_gates() == 0)
    throw ConfigError("emrkc requires an ionic model with gating variables");

  RunResult res;
  res.layout = lay;
  res.grid = op.grid();
  res.rho_F_analytic = analytic_rho_F(op.grid(), op.conductivity());

  Vec y = op.initial_state();
  res.gate_min = 1.0;
  res.gate_max = 0.0;
  track_gate_range(y, lay, res.gate_min, res.gate_max);

  const long n_steps = step_count(cfg.t_end, cfg.dt);
  res.n_steps = n_steps;
  const double dt = cfg.dt;

  // Spectral radii estimated once at t = 0 (warm starts are kept per run).
  SplitRhs rhs;
  rhs.counters = &res.counters;
  RhsFn full_rhs;  // for the plain RKC method
  double rho_full = 0.0;

  switch (cfg.method) {
    case Method::rkc: {
      full_rhs = [&op](double t, const Vec& u, Vec& out) { op.rhs(t, u, out); };
      rho_full = estimate_spectral_radius(0.0, y, full_rhs).rho;
      res.rho_F = rho_full;
      break;
    }
    case Method::mrkc: {
      const Vec trace = single_cell_trace(model, cfg);
      res.stiff_gates = identify_stiff_gates(model, trace);
      const std::vector<int> stiff =
          res.stiff_gates.empty()
              ? std::vector<int>{}
              : std::vector<int>{res.stiff_gates.front()};
      rhs.f_F = [&op, stiff](double t, const Vec& u, Vec& out) {
        op.f_F_with_gates(stiff, t, u, out);
      };
      rhs.f_S = [&op, stiff](double t, const Vec& u, Vec& out) {
        op.f_S_with_gates(stiff, t, u, out);
      };
      rhs.rho_F = estimate_spectral_radius(0.0, y, rhs.f_F).rho;
      rhs.rho_S = estimate_spectral_radius(0.0, y, rhs.f_S).rho;
      res.rho_F = rhs.rho_F;
      res.rho_S = rhs.rho_S;
      break;
    }
    case Method::emrkc:
    case Method::emrkc_progressive: {
      rhs.f_F = [&op](double t, const Vec& u, Vec& out) { op.f_F(t, u, out); };
      rhs.f_S = [&op](double t, const Vec& u, Vec& out) { op.f_S(t, u, out); };
      rhs.exp_part = [&op](const Vec& u, Vec& lam, Vec& yinf) {
        op.exp_part(u, lam, yinf);
      };
      rhs.rho_F = estimate_spectral_radius(0.0, y, rhs.f_F).rho;
      rhs.rho_S = estimate_spectral_radius(0.0, y, rhs.f_S).rho;
      res.rho_F = rhs.rho_F;
      res.rho_S = rhs.rho_S;
      break;
    }
    case Method::imex_rl:
    case Method::exex_rl:
      break;
  }

  const bool multirate =
      cfg.method == Method::mrkc || cfg.method == Method::emrkc ||
      cfg.method == Method::emrkc_progressive;
  if (multirate) res.steps.reserve(std::min<long>(n_steps, 1 << 20));

  const CgConfig cg_cfg;
  const double wall0 = now_s();
  for (long step = 0; step < n_steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    try {
      switch (cfg.method) {
        case Method::rkc: {
          StagePlan plan;
          // Full-RHS evaluations are tallied as fast-term work.
          const RhsFn counted = [&](double r, const Vec& u, Vec& out) {
            full_rhs(r, u, out);
            ++res.counters.n_fF;
          };
          y = rkc_step(t, y, dt, counted, rho_full, cfg.epsilon, &plan);
          res.steps.push_back({plan.s, 0, 0.0});
          break;
        }
        case Method::mrkc: {
          MultirateStepReport rep;
          y = mrkc_step(t, y, dt, rhs, cfg.epsilon, &rep);
          res.steps.push_back({rep.s, rep.m, rep.eta});
          break;
        }
        case Method::emrkc:
        case Method::emrkc_progressive: {
          MultirateStepReport rep;
          y = emrkc_step(t, y, dt, rhs, cfg.epsilon,
                         cfg.method == Method::emrkc
                             ? EmrkcVariant::standard
                             : EmrkcVariant::progressive,
                         &rep);
          res.steps.push_back({rep.s, rep.m, rep.eta});
          break;
        }
        case Method::imex_rl:
          y = imex_rl_step(t, y, dt, op, cg_cfg, &res.counters);
          break;
        case Method::exex_rl:
          y = exex_rl_step(t, y, dt, op, &res.counters);
          break;
      }
    } catch (const NumericalAbort& e) {
      res.aborted = true;
      res.abort_step = step;
      res.abort_reason = e.what();
      break;
    }

    if (max_abs_v(y, lay) > 1e6) {
      res.aborted = true;
      res.abort_step = step;
      res.abort_reason = "norm guard: ||V||_inf exceeded 1e6 mV";
      break;
    }
    track_gate_range(y, lay, res.gate_min, res.gate_max);
  }
  res.counters.wall_time = now_s() - wall0;

  res.final_state = std::move(y);
  return res;
}

void write_snapshot(const std::string& path, const RunResult& result,
                    const IonicModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open snapshot file: " + path);

  out << "node";
  const char* axes[3] = {"x", "y", "z"};
  for (int a = 0; a < result.grid.dim; ++a) out << ',' << axes[a];
  out << ",V";
  for (const auto& name : model.var_names()) out << ',' << name;
  out << '\n';

  const StateLayout& lay = result.layout;
  for (long i = 0; i < lay.n_nodes; ++i) {
    out << i;
    for (int a = 0; a < result.grid.dim; ++a)
      out << ',' << csv::field(node_coord(result.grid, i, a));
    out << ',' << csv::field(result.final_state[i]);
    for (int g = 0; g < lay.n_gates; ++g)
      out << ',' << csv::field(result.final_state[lay.gate_offset(g) + i]);
    for (int a = 0; a < lay.n_aux; ++a)
      out << ',' << csv::field(result.final_state[lay.aux_offset(a) + i]);
    out << '\n';
  }
}

}  // namespace mrkc
