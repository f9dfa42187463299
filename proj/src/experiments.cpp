#include "mrkc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include "mrkc/csv.hpp"

namespace mrkc {

namespace {

// Run fn(i) for i in [0, n) on cfg.threads workers. Each cell owns its
// state; results land in caller-provided slots, so output order does not
// depend on scheduling.
void parallel_cells(long n, int threads, const std::function<void(long)>& fn) {
  const int workers =
      static_cast<int>(std::max<long>(1, std::min<long>(threads, n)));
  if (workers == 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

std::string hex64(unsigned long long h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", h);
  return buf;
}

unsigned long long fnv1a(const std::string& s) {
  unsigned long long h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Canonical serialization of everything the reference depends on. Method
// and probe dt are deliberately absent.
std::string physical_key(const RunConfig& cfg, double dt_ref) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "dim=%d;extent=%.17g,%.17g,%.17g;dx=%.17g,%.17g,%.17g;"
                "model=%s;stim=%.17g;box=%.17g,%.17g,%.17g,%.17g,%.17g,%.17g;"
                "window=%.17g,%.17g;t_end=%.17g;dt_ref=%.17g",
                cfg.dim, cfg.extent[0], cfg.extent[1], cfg.extent[2],
                cfg.dx[0], cfg.dx[1], cfg.dx[2], cfg.model.c_str(),
                cfg.stim_amplitude, cfg.stim_lo[0], cfg.stim_hi[0],
                cfg.stim_lo[1], cfg.stim_hi[1], cfg.stim_lo[2], cfg.stim_hi[2],
                cfg.stim_t0, cfg.stim_t1, cfg.t_end, dt_ref);
  return buf;
}

constexpr char kRefMagic[8] = {'M', 'R', 'E', 'F', '0', '0', '0', '1'};

bool load_reference(const std::string& path, std::size_t expect_size,
                    Vec& state) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  char magic[8];
  std::uint64_t n = 0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in || std::memcmp(magic, kRefMagic, 8) != 0 || n != expect_size)
    return false;
  state.resize(n);
  in.read(reinterpret_cast<char*>(state.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  return static_cast<bool>(in);
}

void store_reference(const std::string& path, const Vec& state) {
  std::filesystem::create_directories(
      std::filesystem::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  const std::uint64_t n = state.size();
  out.write(kRefMagic, 8);
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(state.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
}

Grid grid_of(const RunConfig& cfg) {
  return make_grid(cfg.dim, cfg.extent, cfg.dx);
}

std::span<const double> v_block(const Vec& state, const Grid& g) {
  return std::span(state).subspan(0, g.n_nodes);
}

bool run_is_stable(const RunResult& r) {
  if (r.aborted) return false;
  for (long i = 0; i < r.layout.n_nodes; ++i) {
    const double v = r.final_state[i];
    if (!std::isfinite(v) || std::abs(v) > 1e3) return false;
  }
  return true;
}

}  // namespace

double default_reference_dt(const RunConfig& cfg, std::span<const double> dts) {
  double dt_min = cfg.dt;
  for (double d : dts) dt_min = std::min(dt_min, d);
  if (cfg.reference_dt) return snap_dt(cfg.t_end, *cfg.reference_dt);
  return snap_dt(cfg.t_end, std::min(1e-4, dt_min / 20.0));
}

Vec reference_solution(const RunConfig& cfg, double dt_ref,
                       std::string* cache_path) {
  RunConfig ref_cfg = cfg;
  ref_cfg.method = Method::exex_rl;
  ref_cfg.dt = dt_ref;
  validate(ref_cfg);

  const std::string path =
      cfg.out_dir + "/ref_" + hex64(fnv1a(physical_key(cfg, dt_ref))) + ".bin";
  if (cache_path) *cache_path = path;

  const SimSetup probe = build_setup(ref_cfg);
  const std::size_t expect =
      static_cast<std::size_t>(probe.op->layout().size());

  Vec state;
  if (load_reference(path, expect, state)) return state;

  RunResult res = run_simulation(ref_cfg);
  if (res.aborted)
    throw NumericalAbort("reference run aborted: " + res.abort_reason,
                         res.abort_step, dt_ref);
  store_reference(path, res.final_state);
  return res.final_state;
}

ConvergenceTable run_convergence(const RunConfig& base,
                                 std::span<const double> dts) {
  ConvergenceTable table;
  table.method = base.method;
  table.dt_ref = default_reference_dt(base, dts);
  const Vec ref = reference_solution(base, table.dt_ref);
  const Grid grid = grid_of(base);

  table.rows.resize(dts.size());
  parallel_cells(static_cast<long>(dts.size()), base.threads, [&](long i) {
    RunConfig cfg = base;
    cfg.dt = snap_dt(base.t_end, dts[i]);
    ConvergenceRow& row = table.rows[i];
    row.dt = cfg.dt;
    RunResult res = run_simulation(cfg);
    row.counters = res.counters;
    row.stable = run_is_stable(res);
    if (!res.steps.empty()) {
      row.s = res.steps.front().s;
      row.m = res.steps.front().m;
    }
    row.err = row.stable
                  ? rel_l2_error(v_block(res.final_state, grid),
                                 v_block(ref, grid), grid)
                  : std::numeric_limits<double>::infinity();
  });

  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const auto& prev = table.rows[i - 1];
    auto& cur = table.rows[i];
    if (prev.stable && cur.stable && prev.err > 0 && cur.err > 0)
      cur.order = std::log(prev.err / cur.err) / std::log(prev.dt / cur.dt);
    else
      cur.order = std::numeric_limits<double>::quiet_NaN();
  }
  if (!table.rows.empty())
    table.rows.front().order = std::numeric_limits<double>::quiet_NaN();
  return table;
}

double bisect_explicit_limit(const RunConfig& base) {
  RunConfig cfg = base;
  cfg.method = Method::exex_rl;

  const auto stable_at = [&](double dt) {
    RunConfig probe = cfg;
    probe.dt = snap_dt(cfg.t_end, dt);
    return run_is_stable(run_simulation(probe));
  };

  const SimSetup setup = build_setup(cfg);
  const double rho = analytic_rho_F(setup.op->grid(), setup.op->conductivity());
  double lo = 0.5 / rho;
  double hi = 8.0 / rho;

  for (int i = 0; i < 3 && !stable_at(lo); ++i) lo /= 4.0;
  if (!stable_at(lo))
    throw std::runtime_error(
        "bisect_explicit_limit: no stable step found near 2/rho_F");
  for (int i = 0; i < 8 && stable_at(hi); ++i) hi *= 4.0;

  for (int i = 0; i < 30 && (hi - lo) > 5e-3 * lo; ++i) {
    const double mid = std::sqrt(lo * hi);
    (stable_at(mid) ? lo : hi) = mid;
  }
  return lo;
}

StabilityScan run_effective_stability(const RunConfig& base,
                                      std::span<const double> dts) {
  StabilityScan scan;
  const Grid grid = grid_of(base);
  scan.rho_F_analytic = analytic_rho_F(grid, Conductivity::defaults());

  const double dt_ref = default_reference_dt(base, dts);
  const Vec ref = reference_solution(base, dt_ref);
  const double ref_norm = l2_norm(v_block(ref, grid), grid);

  scan.rows.resize(dts.size());
  parallel_cells(static_cast<long>(dts.size()), base.threads, [&](long i) {
    RunConfig cfg = base;
    cfg.dt = snap_dt(base.t_end, dts[i]);
    StabilityRow& row = scan.rows[i];
    row.dt = cfg.dt;
    RunResult res = run_simulation(cfg);
    row.stable = run_is_stable(res);
    row.rel_norm = row.stable
                       ? l2_norm(v_block(res.final_state, grid), grid) / ref_norm
                       : std::numeric_limits<double>::infinity();
    if (!res.steps.empty()) {
      row.s = res.steps.front().s;
      row.m = res.steps.front().m;
    }
  });

  scan.dt_explicit = bisect_explicit_limit(base);
  return scan;
}

std::vector<EfficiencyRow> run_efficiency(const RunConfig& base,
                                          std::span<const Method> methods,
                                          std::span<const double> dts) {
  const double dt_ref = default_reference_dt(base, dts);
  const Vec ref = reference_solution(base, dt_ref);
  const Grid grid = grid_of(base);

  std::vector<EfficiencyRow> rows(methods.size() * dts.size());
  parallel_cells(static_cast<long>(rows.size()), base.threads, [&](long k) {
    const Method method = methods[k / dts.size()];
    const double dt = dts[k % dts.size()];
    RunConfig cfg = base;
    cfg.method = method;
    cfg.dt = snap_dt(base.t_end, dt);
    EfficiencyRow& row = rows[k];
    row.method = method;
    row.dt = cfg.dt;
    RunResult res = run_simulation(cfg);
    row.counters = res.counters;
    row.stable = run_is_stable(res);
    row.err = row.stable ? rel_l2_error(v_block(res.final_state, grid),
                                        v_block(ref, grid), grid)
                         : std::numeric_limits<double>::infinity();
    if (!res.steps.empty()) {
      row.s = res.steps.front().s;
      row.m = res.steps.front().m;
    }
  });
  return rows;
}

namespace {

std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

void counters_header(std::ostream& out) {
  out << "n_fF,n_fS,n_exp,n_linsolves,cg_iters,wall_s,t_fF_s,t_fS_s,t_exp_s,"
         "t_other_s";
}

void counters_fields(std::ostream& out, const EvalCounters& c) {
  const double other =
      std::max(0.0, c.wall_time - c.t_fF - c.t_fS - c.t_exp);
  out << csv::field(c.n_fF) << ',' << csv::field(c.n_fS) << ','
      << csv::field(c.n_exp_steps) << ',' << csv::field(c.n_linsolves) << ','
      << csv::field(c.cg_iters_total) << ',' << csv::field(c.wall_time) << ','
      << csv::field(c.t_fF) << ',' << csv::field(c.t_fS) << ','
      << csv::field(c.t_exp) << ',' << csv::field(other);
}

}  // namespace

void write_convergence_csv(const std::string& path,
                           const ConvergenceTable& t) {
  auto out = open_out(path);
  out << "method,dt,rel_l2_err,order,s,m,stable,";
  counters_header(out);
  out << '\n';
  for (const auto& r : t.rows) {
    out << method_name(t.method) << ',' << csv::field(r.dt) << ','
        << csv::field(r.err) << ',' << csv::field(r.order) << ','
        << csv::field(r.s) << ',' << csv::field(r.m) << ','
        << csv::field(r.stable) << ',';
    counters_fields(out, r.counters);
    out << '\n';
  }
}

void write_stability_csv(const std::string& path, const StabilityScan& s) {
  auto out = open_out(path);
  out << "dt,rel_norm,stable,s,m\n";
  for (const auto& r : s.rows)
    out << csv::field(r.dt) << ',' << csv::field(r.rel_norm) << ','
        << csv::field(r.stable) << ',' << csv::field(r.s) << ','
        << csv::field(r.m) << '\n';
}

void write_efficiency_csv(const std::string& path,
                          std::span<const EfficiencyRow> rows) {
  auto out = open_out(path);
  out << "method,dt,rel_l2_err,s,m,stable,";
  counters_header(out);
  out << '\n';
  for (const auto& r : rows) {
    out << method_name(r.method) << ',' << csv::field(r.dt) << ','
        << csv::field(r.err) << ',' << csv::field(r.s) << ','
        << csv::field(r.m) << ',' << csv::field(r.stable) << ',';
    counters_fields(out, r.counters);
    out << '\n';
  }
}

void write_sweep_csv(const std::string& path,
                     std::span<const SweepPoint> points) {
  auto out = open_out(path);
  out << "lambda_F,lambda_S,lambda_E,dt,s,m,eta,R,stable\n";
  for (const auto& pt : points) {
    out << csv::field(pt.params.lambda_F) << ','
        << csv::field(pt.params.lambda_S) << ','
        << csv::field(pt.params.lambda_E) << ',' << csv::field(pt.params.dt)
        << ',' << csv::field(pt.verdict.s) << ',' << csv::field(pt.verdict.m)
        << ',' << csv::field(pt.verdict.eta) << ',' << csv::field(pt.verdict.R)
        << ',' << csv::field(pt.verdict.stable) << '\n';
  }
}

}  // namespace mrkc
