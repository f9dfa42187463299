#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mrkc/ionic.hpp"
#include "mrkc/multirate.hpp"

using namespace mrkc;

TEST_CASE("hh rate singularities evaluate to their limits") {
  const auto hh = make_hh_model();
  Vec a(3), b(3);
  hh->rates(-40.0, a, b);
  CHECK(a[0] == 1.0);  // alpha_m limit 0.1 * 10
  hh->rates(-55.0, a, b);
  CHECK(a[2] == 0.1);  // alpha_n limit 0.01 * 10
  // alpha_m is smooth through the switchover: even part at +-delta around
  // the singular point stays at the limit up to O(delta^2)
  Vec a1(3), b1(3), a2(3), b2(3);
  hh->rates(-40.0 + 1e-3, a1, b1);
  hh->rates(-40.0 - 1e-3, a2, b2);
  CHECK(0.5 * (a1[0] + a2[0]) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(a1[0] - a2[0] == doctest::Approx(1e-4).epsilon(1e-3));  // slope 1/20
}

TEST_CASE("hh rates stay physiological over [-100, 60] mV") {
  const auto hh = make_hh_model();
  Vec a(3), b(3), lam(3), zinf(3);
  for (double V = -100.0; V <= 60.0; V += 0.1) {
    hh->rates(V, a, b);
    hh->gate_coeffs(V, lam, zinf);
    for (int g = 0; g < 3; ++g) {
      CHECK(a[g] >= 0.0);
      CHECK(b[g] >= 0.0);
      CHECK(lam[g] <= 0.0);
      CHECK(zinf[g] >= 0.0);
      CHECK(zinf[g] <= 1.0);
    }
  }
}

TEST_CASE("gating rewrite identity Lambda (z - z_inf) = alpha(1-z) - beta z") {
  const auto hh = make_hh_model();
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> vdist(-100.0, 60.0);
  std::uniform_real_distribution<double> zdist(0.0, 1.0);
  Vec a(3), b(3), lam(3), zinf(3);
  for (int trial = 0; trial < 500; ++trial) {
    const double V = vdist(rng);
    const double z = zdist(rng);
    hh->rates(V, a, b);
    hh->gate_coeffs(V, lam, zinf);
    for (int g = 0; g < 3; ++g) {
      const double lhs = lam[g] * (z - zinf[g]);
      const double rhs = a[g] * (1.0 - z) - b[g] * z;
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
    }
  }
}

TEST_CASE("membrane current") {
  const auto hh = make_hh_model();
  SUBCASE("zero gates leave only the leak") {
    const Vec z{0.0, 0.0, 0.0};
    CHECK(hh->ionic_current(-20.0, z, {}) ==
          doctest::Approx(0.003 * (-20.0 + 54.387)).epsilon(1e-15));
    CHECK(hh->ionic_current(-54.387, z, {}) == doctest::Approx(0.0));
  }
  SUBCASE("resting state cancels the total current") {
    const IonicModel::Rest rest = hh->resting_state();
    CHECK(std::abs(hh->ionic_current(rest.V, rest.z_E, {})) < 1e-10);
  }
}

TEST_CASE("resting state") {
  const auto hh = make_hh_model();
  const IonicModel::Rest rest = hh->resting_state();

  SUBCASE("independent bisection oracle agrees") {
    Vec lam(3), zinf(3);
    const auto steady = [&](double V) {
      hh->gate_coeffs(V, lam, zinf);
      return hh->ionic_current(V, zinf, {});
    };
    double lo = -80.0, hi = -50.0;
    REQUIRE(steady(lo) * steady(hi) < 0.0);
    for (int i = 0; i < 100; ++i) {
      const double mid = 0.5 * (lo + hi);
      (steady(lo) * steady(mid) <= 0.0 ? hi : lo) = mid;
    }
    CHECK(rest.V == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-9));
    CHECK(rest.V == doctest::Approx(-65.0).epsilon(0.01));
  }

  SUBCASE("gates sit at their steady state") {
    Vec lam(3), zinf(3);
    hh->gate_coeffs(rest.V, lam, zinf);
    for (int g = 0; g < 3; ++g)
      CHECK(rest.z_E[g] == doctest::Approx(zinf[g]).epsilon(1e-12));
    // f_E vanishes identically at the fixed point
    for (int g = 0; g < 3; ++g)
      CHECK(std::abs(lam[g] * (rest.z_E[g] - zinf[g])) < 1e-12);
  }

  SUBCASE("equilibrium persists over 100 ms of single-cell integration") {
    double V = rest.V;
    Vec z = rest.z_E;
    Vec lam(3), zinf(3);
    const double dt = 0.01;
    for (long i = 0; i < 10000; ++i) {
      hh->gate_coeffs(V, lam, zinf);
      for (int g = 0; g < 3; ++g)
        z[g] += std::expm1(dt * lam[g]) * (z[g] - zinf[g]);
      V += dt * (-hh->ionic_current(V, z, {}) / 0.01);
    }
    CHECK(std::abs(V - rest.V) < 0.01);
  }
}

namespace {

// Single-gate toy model for the identification edge case.
class OneGate final : public IonicModel {
public:
  std::string name() const override { return "onegate"; }
  int n_gates() const override { return 1; }
  int n_aux() const override { return 0; }
  std::vector<std::string> var_names() const override { return {"w"}; }
  void rates(double V, std::span<double> alpha,
             std::span<double> beta) const override {
    alpha[0] = 0.1 * std::exp(V / 50.0);
    beta[0] = 0.2;
  }
  double ionic_current(double V, std::span<const double> z,
                       std::span<const double>) const override {
    return 0.01 * z[0] * (V + 60.0);
  }
};

}  // namespace

TEST_CASE("identify_stiff_gates") {
  const auto hh = make_hh_model();
  SUBCASE("constant trajectory matches direct rate ordering") {
    Vec a(3), b(3);
    hh->rates(-65.0, a, b);
    const auto order = identify_stiff_gates(*hh, Vec{-65.0});
    for (std::size_t i = 1; i < order.size(); ++i)
      CHECK(a[order[i - 1]] + b[order[i - 1]] >= a[order[i]] + b[order[i]]);
  }
  SUBCASE("the m gate is stiffest over an action-potential voltage range") {
    Vec sweep;
    for (double V = -80.0; V <= 40.0; V += 0.5) sweep.push_back(V);
    const auto order = identify_stiff_gates(*hh, sweep);
    CHECK(order.front() == 0);  // m
  }
  SUBCASE("single-gate model returns that gate") {
    const OneGate g;
    CHECK(identify_stiff_gates(g, Vec{-65.0, 0.0}) == std::vector<int>{0});
  }
  SUBCASE("empty trajectory is rejected") {
    CHECK_THROWS_AS(identify_stiff_gates(*hh, Vec{}), std::invalid_argument);
  }
}

TEST_CASE("exponential gate update preserves [0,1] for hh coefficients") {
  const auto hh = make_hh_model();
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> vdist(-100.0, 60.0);
  std::uniform_real_distribution<double> zdist(0.0, 1.0);
  Vec lam(3), zinf(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double V = vdist(rng);
    hh->gate_coeffs(V, lam, zinf);
    const Vec z{zdist(rng), zdist(rng), zdist(rng)};
    const Vec out = exponential_euler_step(z, 5.0 * zdist(rng), lam, zinf);
    for (int g = 0; g < 3; ++g) {
      CHECK(out[g] >= 0.0);
      CHECK(out[g] <= 1.0);
    }
  }
}

TEST_CASE("model factory") {
  CHECK(make_ionic_model("hh")->name() == "hh");
  CHECK(make_ionic_model("hh")->n_gates() == 3);
  CHECK(make_ionic_model("hh")->n_aux() == 0);
  CHECK_THROWS_AS(make_ionic_model("ttp"), ConfigError);
}
