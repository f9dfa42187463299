// Command-line front end: single simulations, convergence / stability /
// efficiency experiments, test-equation sweeps, and stage planning.
//
// Exit codes: 0 ok, 2 config error, 3 numerical abort.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mrkc/csv.hpp"
#include "mrkc/experiments.hpp"
#include "mrkc/multirate.hpp"
#include "mrkc/simulate.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string method;
  double dt = 0.0;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required = true) {
  auto* opt = cmd->add_option("--config", f.config_path, "config file path");
  if (config_required) opt->required();
  cmd->add_option("--out", f.out_dir, "output directory (overrides config)");
  cmd->add_option("--method", f.method, "method name (overrides config)");
  cmd->add_option("--dt", f.dt, "time step (overrides config)");
  cmd->add_option("--threads", f.threads, "worker threads for experiment cells");
}

mrkc::RunConfig load_config(const CommonFlags& f) {
  mrkc::RunConfig cfg = f.config_path.empty()
                            ? mrkc::RunConfig{}
                            : mrkc::parse_config_file(f.config_path);
  if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
  if (!f.method.empty()) cfg.method = mrkc::parse_method(f.method);
  if (f.dt > 0.0) cfg.dt = f.dt;
  cfg.threads = std::max(1, f.threads);
  mrkc::validate(cfg);
  return cfg;
}

std::vector<double> experiment_dts(const mrkc::RunConfig& cfg) {
  if (!cfg.dts.empty()) return cfg.dts;
  throw mrkc::ConfigError("config needs [experiment] dts for this command");
}

int cmd_simulate(const CommonFlags& flags) {
  const mrkc::RunConfig cfg = load_config(flags);
  const mrkc::SimSetup setup = mrkc::build_setup(cfg);
  mrkc::RunResult res = mrkc::run_simulation(cfg);

  std::printf("method=%s dt=%s steps=%ld\n",
              mrkc::method_name(cfg.method).c_str(),
              mrkc::csv::field(cfg.dt).c_str(), res.n_steps);
  std::printf("rho_F=%.6g rho_S=%.6g rho_F_analytic=%.6g\n", res.rho_F,
              res.rho_S, res.rho_F_analytic);
  if (!res.steps.empty())
    std::printf("stages: s=%d m=%d eta=%.6g\n", res.steps.front().s,
                res.steps.front().m, res.steps.front().eta);
  std::printf(
      "counters: n_fF=%lld n_fS=%lld n_exp=%lld n_linsolves=%lld "
      "cg_iters=%lld wall=%.3fs\n",
      res.counters.n_fF, res.counters.n_fS, res.counters.n_exp_steps,
      res.counters.n_linsolves, res.counters.cg_iters_total,
      res.counters.wall_time);

  if (res.aborted) {
    std::fprintf(stderr, "numerical abort at step %ld (dt=%g): %s\n",
                 res.abort_step, cfg.dt, res.abort_reason.c_str());
    return 3;
  }

  if (!cfg.snapshot.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    const std::string path = cfg.out_dir + "/" + cfg.snapshot;
    mrkc::write_snapshot(path, res, *setup.model);
    std::printf("snapshot: %s\n", path.c_str());
  }
  return 0;
}

int cmd_converge(const CommonFlags& flags) {
  const mrkc::RunConfig cfg = load_config(flags);
  const std::vector<double> dts = experiment_dts(cfg);
  const mrkc::ConvergenceTable table = mrkc::run_convergence(cfg, dts);
  const std::string path = cfg.out_dir + "/converge.csv";
  mrkc::write_convergence_csv(path, table);
  std::printf("reference dt: %s\n", mrkc::csv::field(table.dt_ref).c_str());
  for (const auto& r : table.rows)
    std::printf("dt=%-12s err=%-12.6g order=%-8.3g s=%d m=%d %s\n",
                mrkc::csv::field(r.dt).c_str(), r.err, r.order, r.s, r.m,
                r.stable ? "" : "UNSTABLE");
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_stability_scan(const CommonFlags& flags) {
  const mrkc::RunConfig cfg = load_config(flags);
  const std::vector<double> dts = experiment_dts(cfg);
  const mrkc::StabilityScan scan = mrkc::run_effective_stability(cfg, dts);
  const std::string path = cfg.out_dir + "/stability.csv";
  mrkc::write_stability_csv(path, scan);
  std::printf("EXEX-RL stability limit: dt=%.6g (2/rho_F analytic: %.6g)\n",
              scan.dt_explicit, 2.0 / scan.rho_F_analytic);
  for (const auto& r : scan.rows)
    std::printf("dt=%-12s rel_norm=%-12.6g s=%d m=%d %s\n",
                mrkc::csv::field(r.dt).c_str(), r.rel_norm, r.s, r.m,
                r.stable ? "stable" : "UNSTABLE");
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_efficiency(const CommonFlags& flags) {
  const mrkc::RunConfig cfg = load_config(flags);
  const std::vector<double> dts = experiment_dts(cfg);
  std::vector<mrkc::Method> methods = cfg.methods;
  if (methods.empty())
    methods = {mrkc::Method::emrkc, mrkc::Method::mrkc, mrkc::Method::imex_rl};
  const auto rows = mrkc::run_efficiency(cfg, methods, dts);
  const std::string path = cfg.out_dir + "/efficiency.csv";
  mrkc::write_efficiency_csv(path, rows);
  for (const auto& r : rows)
    std::printf("%-18s dt=%-12s err=%-12.6g wall=%.3fs\n",
                mrkc::method_name(r.method).c_str(),
                mrkc::csv::field(r.dt).c_str(), r.err, r.counters.wall_time);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_test_eq(const CommonFlags& flags, const std::vector<double>& dts_flag) {
  const std::vector<double> lambdas{0.0, -1.0, -10.0, -100.0, -1000.0, -10000.0};
  const std::vector<double> dts =
      dts_flag.empty() ? std::vector<double>{0.1, 1.0, 10.0} : dts_flag;
  const auto points =
      mrkc::sweep_test_equation(lambdas, lambdas, lambdas, dts);
  const std::string out_dir = flags.out_dir.empty() ? "out" : flags.out_dir;
  const std::string path = out_dir + "/testeq.csv";
  mrkc::write_sweep_csv(path, points);

  std::size_t unstable = 0, outside = 0;
  for (const auto& p : points) {
    if (!p.verdict.stable) ++unstable;
    if (!p.verdict.condition_checks.at("rhoF_ge_4rhoS")) ++outside;
  }
  std::printf(
      "%zu points (%zu outside the fast-dominance premise), %zu unstable, "
      "wrote %s\n",
      points.size(), outside, unstable, path.c_str());
  return 0;
}

int cmd_stages(double dt, double rho_f, double rho_s, double epsilon) {
  const mrkc::StagePlan outer = mrkc::get_stages(dt, rho_s, epsilon);
  const double eta = 2.0 * dt / outer.ell;
  const mrkc::StagePlan inner = mrkc::get_stages(eta, rho_f, epsilon);
  std::printf("s=%d ell_s=%.6g eta=%.6g m=%d ell_m=%.6g\n", outer.s, outer.ell,
              eta, inner.s, inner.ell);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explicit stabilized multirate solvers for the monodomain model"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::vector<double> dts_flag;
  double dt = 0.0, rho_f = 0.0, rho_s = 0.0, epsilon = mrkc::kDefaultDamping;

  auto* simulate = app.add_subcommand("simulate", "run one simulation");
  add_common(simulate, flags);
  auto* converge =
      app.add_subcommand("converge", "convergence table against a reference");
  add_common(converge, flags);
  auto* scan = app.add_subcommand("stability-scan",
                                  "stability scan over dt plus the explicit limit");
  add_common(scan, flags);
  auto* efficiency =
      app.add_subcommand("efficiency", "work vs accuracy for several methods");
  add_common(efficiency, flags);

  auto* testeq = app.add_subcommand(
      "test-eq", "amplification sweep on the scalar test equation");
  testeq->add_option("--out", flags.out_dir, "output directory");
  testeq->add_option("--dts", dts_flag, "dt values for the sweep");

  auto* stages =
      app.add_subcommand("stages", "print the (s, m, eta) plan for dt, rho");
  stages->add_option("--dt", dt, "time step")->required();
  stages->add_option("--rho-f", rho_f, "fast spectral radius")->required();
  stages->add_option("--rho-s", rho_s, "slow spectral radius")->required();
  stages->add_option("--epsilon", epsilon, "damping parameter");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(flags);
    if (converge->parsed()) return cmd_converge(flags);
    if (scan->parsed()) return cmd_stability_scan(flags);
    if (efficiency->parsed()) return cmd_efficiency(flags);
    if (testeq->parsed()) return cmd_test_eq(flags, dts_flag);
    if (stages->parsed()) return cmd_stages(dt, rho_f, rho_s, epsilon);
  } catch (const mrkc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const mrkc::NumericalAbort& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
