#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mrkc/baselines.hpp"

using namespace mrkc;

TEST_CASE("cg_solve basics") {
  SUBCASE("identity converges in one iteration") {
    const LinOp id = [](const Vec& u, Vec& out) { out = u; };
    const Vec b{1.0, -2.0, 3.5};
    Vec x;
    const CgResult r = cg_solve(id, b, x, {});
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    for (int i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(b[i]));
  }
  SUBCASE("zero rhs gives the zero solution") {
    const LinOp id = [](const Vec& u, Vec& out) { out = u; };
    Vec x{5.0, 5.0};
    const CgResult r = cg_solve(id, Vec{0.0, 0.0}, x, {});
    CHECK(r.iterations == 0);
    CHECK(x == Vec{0.0, 0.0});
  }
  SUBCASE("iteration cap reports non-convergence with the residual") {
    // 1-D Laplacian-ish SPD system that needs more than one iteration
    const long n = 20;
    const LinOp op = [n](const Vec& u, Vec& out) {
      for (long i = 0; i < n; ++i) {
        out[i] = 4.0 * u[i];
        if (i > 0) out[i] -= u[i - 1];
        if (i < n - 1) out[i] -= u[i + 1];
      }
    };
    CgConfig cfg;
    cfg.max_iters = 1;
    Vec x;
    const CgResult r = cg_solve(op, Vec(n, 1.0), x, cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.residual > 0.0);
  }
}

namespace {

// Thomas-algorithm oracle for tridiagonal systems.
Vec thomas_solve(Vec lower, Vec diag, Vec upper, Vec rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  Vec x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  return x;
}

// Minimal problem surrogate: diagonal "diffusion" V' = a V on one node, a
// single gate with frozen coefficients, no auxiliary block.
class ScalarSurrogate final : public MonodomainProblem {
public:
  ScalarSurrogate(double a, double lambda, double z_inf, double lambda_S)
      : a_(a), lambda_(lambda), z_inf_(z_inf), lambda_S_(lambda_S) {
    layout_ = StateLayout{1, 1, 0};
  }
  const StateLayout& layout() const override { return layout_; }
  Vec node_weights() const override { return Vec{1.0}; }
  void apply_diffusion(std::span<const double> V,
                       std::span<double> out) const override {
    out[0] = a_ * V[0];
  }
  void v_reaction(double, const Vec& y, std::span<double> out) const override {
    out[0] = lambda_S_ * y[0];
  }
  void gate_coeffs_field(const Vec&, std::span<double> lambda,
                         std::span<double> z_inf) const override {
    lambda[0] = lambda_;
    z_inf[0] = z_inf_;
  }
  void aux_rates_field(const Vec&, std::span<double>) const override {}

private:
  StateLayout layout_;
  double a_, lambda_, z_inf_, lambda_S_;
};

}  // namespace

TEST_CASE("cg matches a tridiagonal direct solve on the 1-D implicit system") {
  // (I - dt * scaled diffusion) on 51 nodes
  const double e[] = {5.0};
  const double d[] = {0.1};
  const Grid g = make_grid(1, e, d);
  REQUIRE(g.n_nodes == 51);
  const Conductivity c = Conductivity::defaults();
  const double dt = 0.05;
  const double w = c.sigma[0] / (c.chi * c.C_m * 0.01);

  // weighted-coordinate operator, as the IMEX step uses it
  const Vec wq = quadrature_weights(g);
  Vec sw(g.n_nodes), isw(g.n_nodes);
  for (long i = 0; i < g.n_nodes; ++i) {
    sw[i] = std::sqrt(wq[i]);
    isw[i] = 1.0 / sw[i];
  }
  Vec scratch(g.n_nodes), tmp(g.n_nodes);
  const LinOp op = [&](const Vec& u, Vec& out) {
    for (long i = 0; i < g.n_nodes; ++i) tmp[i] = isw[i] * u[i];
    diffusion_apply(g, c, tmp, scratch);
    for (long i = 0; i < g.n_nodes; ++i) out[i] = u[i] - dt * sw[i] * scratch[i];
  };

  std::mt19937_64 rng(59);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec rhs(g.n_nodes);
  for (double& v : rhs) v = gauss(rng);

  // oracle: the unweighted tridiagonal system (I - dt A) x = rhs
  const long n = g.n_nodes;
  Vec lower(n, -dt * w), upper(n, -dt * w), diag(n, 1.0 + 2.0 * dt * w);
  upper[0] = -2.0 * dt * w;
  lower[n - 1] = -2.0 * dt * w;
  const Vec x_direct = thomas_solve(lower, diag, upper, rhs);

  Vec b(n), x(n, 0.0);
  for (long i = 0; i < n; ++i) b[i] = sw[i] * rhs[i];
  CgConfig cfg;
  cfg.rel_tol = 1e-12;
  const CgResult r = cg_solve(op, b, x, cfg);
  CHECK(r.converged);
  for (long i = 0; i < n; ++i)
    CHECK(isw[i] * x[i] == doctest::Approx(x_direct[i]).epsilon(1e-8));
}

TEST_CASE("imex_rl_step") {
  SUBCASE("scalar implicit Euler closed form") {
    const ScalarSurrogate prob(-4.0, 0.0, 0.0, 0.0);
    const double dt = 0.7;
    const Vec y{2.0, 0.5};
    const Vec out = imex_rl_step(0.0, y, dt, prob);
    CHECK(out[0] == doctest::Approx(2.0 / (1.0 + 4.0 * dt)).epsilon(1e-12));
  }
  SUBCASE("gating with frozen coefficients is exact for any dt") {
    const double lam = -37.0, zinf = 0.4;
    const ScalarSurrogate prob(0.0, lam, zinf, 0.0);
    for (double dt : {1e-3, 0.1, 5.0, 50.0}) {
      const Vec y{0.0, 0.9};
      const Vec out = imex_rl_step(0.0, y, dt, prob);
      const double exact = zinf + (0.9 - zinf) * std::exp(lam * dt);
      CHECK(out[1] == doctest::Approx(exact).epsilon(1e-12));
    }
  }
  SUBCASE("differs from exex_rl_step by O(dt^2)") {
    const ScalarSurrogate prob(-3.0, -10.0, 0.3, -1.5);
    const Vec y{1.0, 0.7};
    const auto gap = [&](double dt) {
      const Vec a = imex_rl_step(0.0, y, dt, prob);
      const Vec b = exex_rl_step(0.0, y, dt, prob);
      return std::abs(a[0] - b[0]);
    };
    const double g8 = gap(std::pow(2.0, -8));
    const double g9 = gap(std::pow(2.0, -9));
    CHECK(g8 / g9 == doctest::Approx(4.0).epsilon(0.25));
  }
  SUBCASE("counters record the solve") {
    const ScalarSurrogate prob(-4.0, -1.0, 0.5, 0.0);
    EvalCounters ctr;
    imex_rl_step(0.0, Vec{1.0, 0.5}, 0.1, prob, {}, &ctr);
    CHECK(ctr.n_linsolves == 1);
    CHECK(ctr.n_exp_steps == 1);
    CHECK(ctr.n_fS == 1);
  }
}

TEST_CASE("exex_rl_step") {
  SUBCASE("identically zero rhs keeps the state") {
    const ScalarSurrogate prob(0.0, 0.0, 0.7, 0.0);
    const Vec y{3.0, 0.7};  // gate at its own z_inf
    const Vec out = exex_rl_step(0.0, y, 0.5, prob);
    CHECK(out[0] == 3.0);
    CHECK(out[1] == doctest::Approx(0.7).epsilon(1e-15));
  }
  SUBCASE("scalar explicit Euler") {
    const ScalarSurrogate prob(-2.0, 0.0, 0.0, 0.0);
    const Vec out = exex_rl_step(0.0, Vec{1.5, 0.0}, 0.25, prob);
    CHECK(out[0] == doctest::Approx(1.5 * (1.0 - 0.5)).epsilon(1e-14));
  }
}

TEST_CASE("IMEX-RL amplification on the linear split test") {
  // V_new = (1 + dt lS) V / (1 - dt lF): bounded by 1 whenever the
  // explicit factor is, for any lF <= 0.
  for (double lF : {0.0, -1.0, -100.0, -1e6}) {
    for (double lS : {0.0, -0.5, -1.0}) {
      for (double dt : {0.1, 1.0, 2.0}) {
        if (std::abs(1.0 + dt * lS) > 1.0) continue;
        const ScalarSurrogate prob(lF, -5.0, 0.0, lS);
        const Vec out = imex_rl_step(0.0, Vec{1.0, 0.0}, dt, prob);
        CHECK(std::abs(out[0]) <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("exex_rl_step blows up past the explicit stability bound") {
  const double e[] = {5.0};
  const double d[] = {0.1};
  const Grid g = make_grid(1, e, d);
  const Conductivity c = Conductivity::defaults();
  const MonodomainOperator op =
      build_problem(g, c, make_hh_model(), StimulusProtocol{});
  const double rho = analytic_rho_F(g, c);

  // start from rest plus a rough perturbation to excite the stiff modes
  Vec y = op.initial_state();
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  for (long i = 0; i < g.n_nodes; ++i) y[i] += jitter(rng);

  const double dt = 2.5 / rho;  // past the 2/rho limit
  bool blew_up = false;
  for (int step = 0; step < 400 && !blew_up; ++step) {
    y = exex_rl_step(step * dt, y, dt, op);
    for (long i = 0; i < g.n_nodes; ++i)
      if (!std::isfinite(y[i]) || std::abs(y[i]) > 1e6) blew_up = true;
  }
  CHECK(blew_up);
}
