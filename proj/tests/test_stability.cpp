#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mrkc/multirate.hpp"
#include "mrkc/stability.hpp"

using namespace mrkc;

namespace {

SplitRhs scalar_split(double lF, double lS, double lE) {
  SplitRhs rhs;
  rhs.f_F = [lF](double, const Vec& y, Vec& out) { out[0] = lF * y[0]; };
  rhs.f_S = [lS](double, const Vec& y, Vec& out) { out[0] = lS * y[0]; };
  rhs.exp_part = [lE](const Vec&, Vec& lam, Vec& yi) {
    lam[0] = lE;
    yi[0] = 0.0;
  };
  rhs.rho_F = std::abs(lF);
  rhs.rho_S = std::abs(lS);
  return rhs;
}

}  // namespace

TEST_CASE("amplification_mrkc") {
  SUBCASE("zero lambdas give R = 1") {
    const StabilityVerdict v = amplification_mrkc({0.0, 0.0, 0.0, 1.0, 0.05});
    CHECK(v.R == 1.0);
    CHECK(v.stable);
    CHECK(v.s == 1);
    CHECK(v.m == 1);
  }
  SUBCASE("matches the actual stepper to 1e-12") {
    const TestEqParams p{-10.0, -1.0, 0.0, 0.1, 0.05};
    const StabilityVerdict v = amplification_mrkc(p);
    const Vec out = mrkc_step(0.0, Vec{1.0}, p.dt, scalar_split(-10, -1, 0));
    CHECK(v.R == doctest::Approx(out[0]).epsilon(1e-12));
  }
  SUBCASE("stiff theorem instance is stable with all checks passing") {
    const StabilityVerdict v =
        amplification_mrkc({-1e4, -10.0, 0.0, 1.0, 0.05});
    CHECK(std::abs(v.R) <= 1.0 + 1e-12);
    for (const auto& [name, ok] : v.condition_checks) {
      INFO(name);
      CHECK(ok);
    }
  }
  SUBCASE("positive lambda and nonzero lambda_E are rejected") {
    CHECK_THROWS_AS(amplification_mrkc({1.0, 0.0, 0.0, 1.0, 0.05}),
                    std::invalid_argument);
    CHECK_THROWS_AS(amplification_mrkc({-1.0, 0.0, -1.0, 1.0, 0.05}),
                    std::invalid_argument);
  }
}

TEST_CASE("amplification_emrkc") {
  SUBCASE("lambda_E = 0 coincides with the mrkc verdict") {
    std::mt19937_64 rng(67);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      const TestEqParams p{-std::pow(10.0, 4 * unit(rng)),
                           -std::pow(10.0, unit(rng)), 0.0,
                           std::pow(10.0, -1 + 2 * unit(rng)), 0.05};
      const StabilityVerdict a = amplification_emrkc(p);
      const StabilityVerdict b = amplification_mrkc(p);
      CHECK(a.R == doctest::Approx(b.R).epsilon(1e-14));
      CHECK(a.s == b.s);
      CHECK(a.m == b.m);
    }
  }
  SUBCASE("inner factor formula at explicitly given stages and span") {
    // At m = 1 and eta = 0.1: (lF+lS) e^{eta lE} + phi(eta lE) lE
    const double f =
        averaged_force_factor_emrkc(1, 0.1, -10.0, -1.0, -5.0, 0.05);
    CHECK(f == doctest::Approx(-10.60653).epsilon(1e-6));
    CHECK(f == doctest::Approx(-11.0 * std::exp(-0.5) + phi(-0.5) * -5.0)
                   .epsilon(1e-14));
  }
  SUBCASE("matches the actual stepper to 1e-12") {
    const TestEqParams p{-10.0, -1.0, -5.0, 0.1, 0.05};
    const StabilityVerdict v = amplification_emrkc(p);
    const Vec out =
        emrkc_step(0.0, Vec{1.0}, p.dt, scalar_split(-10, -1, -5));
    CHECK(v.R == doctest::Approx(out[0]).epsilon(1e-12));
  }
  SUBCASE("grid sweep is stable wherever the fast part dominates") {
    // The theorem's hypothesis B additionally assumes |lF| >= 4 |lS|; the
    // planner encodes only the eta/stage conditions, so grid points with a
    // dominant slow part sit outside the guarantee (and some are indeed
    // unstable there).
    const std::vector<double> lams{0.0, -1.0, -10.0, -100.0, -1000.0, -10000.0};
    const std::vector<double> dts{0.1, 1.0, 10.0};
    const auto points = sweep_test_equation(lams, lams, lams, dts);
    CHECK(points.size() == 6 * 6 * 6 * 3);
    std::size_t covered = 0;
    for (const auto& pt : points) {
      if (!pt.verdict.condition_checks.at("rhoF_ge_4rhoS")) continue;
      ++covered;
      INFO("lF=" << pt.params.lambda_F << " lS=" << pt.params.lambda_S
                 << " lE=" << pt.params.lambda_E << " dt=" << pt.params.dt);
      CHECK(std::abs(pt.verdict.R) <= 1.0 + 1e-12);
      CHECK(pt.verdict.condition_checks.at("raw_bracket"));
    }
    CHECK(covered > 200);  // a substantial share of the grid is covered
  }
}

TEST_CASE("monotone damping of the exponential factor") {
  // At fixed (s, m, eta), turning on lambda_E <= 0 contracts the
  // amplification: e^{eta lE} <= 1 shrinks the first term and the phi term
  // is itself nonpositive.
  for (double lF : {-10.0, -100.0, -1000.0}) {
    for (double lS : {0.0, -1.0, -10.0}) {
      const TestEqParams base{lF, lS, 0.0, 1.0, 0.05};
      const StabilityVerdict v0 = amplification_emrkc(base);
      const double f0 =
          averaged_force_factor_emrkc(v0.m, v0.eta, lF, lS, 0.0, 0.05);
      const double f1 =
          averaged_force_factor_emrkc(v0.m, v0.eta, lF, lS, -1000.0, 0.05);
      const double R0 = stability_poly(v0.s, 0.05, base.dt * f0);
      const double R1 = stability_poly(v0.s, 0.05, base.dt * f1);
      CHECK(std::abs(R1) <= std::abs(R0) + 1e-12);
    }
  }
}

TEST_CASE("check_conditions") {
  SUBCASE("planner output satisfies hypothesis B") {
    const TestEqParams p{-500.0, -3.0, 0.0, 0.5, 0.05};
    const StabilityVerdict v = amplification_mrkc(p);
    const auto checks = check_conditions(v.s, v.m, v.eta, p.dt, 500.0, 3.0,
                                         Hypothesis::B, 0.05);
    CHECK(checks.at("dt_rhoS_le_ells"));
    CHECK(checks.at("eta_rhoF_le_ellm"));
    CHECK(checks.at("eta_formula"));
    CHECK(checks.at("rhoF_ge_4rhoS"));
  }
  SUBCASE("violated outer bound is reported") {
    // s = 1: ell_s = beta; choose dt*rho_S = ell_s + 0.1
    const double beta = 2.0 - 4.0 * 0.05 / 3.0;
    const auto checks = check_conditions(1, 1, 2.0 / beta, 1.0, 0.0,
                                         beta + 0.1, Hypothesis::B, 0.05);
    CHECK_FALSE(checks.at("dt_rhoS_le_ells"));
  }
  SUBCASE("hypothesis A eta formula") {
    const double beta = 2.0 - 4.0 * 0.05 / 3.0;
    const double ell_s = beta * 4.0;  // s = 2
    const double eta = 6.0 * 1.0 / ell_s * 4.0 / 3.0;  // m = 2
    const auto checks =
        check_conditions(2, 2, eta, 1.0, 0.0, 0.0, Hypothesis::A, 0.05);
    CHECK(checks.at("eta_formula"));
  }
  SUBCASE("hypothesis A with m = 1 is singular") {
    CHECK_THROWS_AS(
        check_conditions(1, 1, 1.0, 1.0, 1.0, 1.0, Hypothesis::A, 0.05),
        std::invalid_argument);
  }
}

TEST_CASE("oracle equivalence over random parameter tuples") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double lF = -std::pow(10.0, 4.0 * unit(rng));
    const double lS = -std::pow(10.0, 1.5 * unit(rng));
    const double lE = -std::pow(10.0, 3.0 * unit(rng));
    const double dt = std::pow(10.0, -2.0 + 3.0 * unit(rng));

    const StabilityVerdict vm = amplification_mrkc({lF, lS, 0.0, dt, 0.05});
    const Vec ym = mrkc_step(0.0, Vec{1.0}, dt, scalar_split(lF, lS, 0.0));
    CHECK(vm.R == doctest::Approx(ym[0]).epsilon(1e-12));

    const StabilityVerdict ve = amplification_emrkc({lF, lS, lE, dt, 0.05});
    const Vec ye = emrkc_step(0.0, Vec{1.0}, dt, scalar_split(lF, lS, lE));
    CHECK(ve.R == doctest::Approx(ye[0]).epsilon(1e-12));
  }
}
