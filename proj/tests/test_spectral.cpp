#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "mrkc/spectral.hpp"

using namespace mrkc;

TEST_CASE("null operator returns rho = 0") {
  const RhsFn zero = [](double, const Vec& y, Vec& out) {
    out.assign(y.size(), 0.0);
  };
  const RhoEstimate est = estimate_spectral_radius(0.0, Vec{1.0, 2.0}, zero);
  CHECK(est.rho == 0.0);
}

TEST_CASE("diagonal operator") {
  const RhsFn f = [](double, const Vec& y, Vec& out) {
    out[0] = -3.0 * y[0];
    out[1] = -7.0 * y[1];
  };
  const RhoEstimate est =
      estimate_spectral_radius(0.0, Vec{0.5, 0.5}, f, Vec{1.0, 1.0});
  CHECK(est.converged);
  CHECK(est.rho / est.safety == doctest::Approx(7.0).epsilon(0.01));
}

TEST_CASE("1-D Neumann Laplacian matches the closed-form eigenvalue") {
  // sigma/(chi C_m dx^2) scaled stencil on 201 nodes, dx = 0.1
  const long n = 201;
  const double sigma = 0.17 * 0.62 / 0.79;
  const double w = sigma / (140.0 * 0.01 * 0.1 * 0.1);
  const RhsFn lap = [n, w](double, const Vec& y, Vec& out) {
    for (long i = 0; i < n; ++i) {
      const double vm = i > 0 ? y[i - 1] : y[i + 1];
      const double vp = i < n - 1 ? y[i + 1] : y[i - 1];
      out[i] = w * (vp - 2.0 * y[i] + vm);
    }
  };
  const Vec y(n, -65.0);
  const RhoEstimate est = estimate_spectral_radius(0.0, y, lap);
  const double sn = std::sin((n - 1) * std::numbers::pi / (2.0 * n));
  const double analytic = 4.0 * w * sn * sn;
  CHECK(est.rho / est.safety == doctest::Approx(analytic).epsilon(0.05));
}

TEST_CASE("warm start converges in at most 2 iterations") {
  const RhsFn f = [](double, const Vec& y, Vec& out) {
    out[0] = -2.0 * y[0] + 0.3 * y[1];
    out[1] = 0.3 * y[0] - 9.0 * y[1];
  };
  const Vec y{1.0, -0.5};
  const RhoEstimate cold = estimate_spectral_radius(0.0, y, f);
  CHECK(cold.converged);
  const RhoEstimate warm =
      estimate_spectral_radius(0.0, y, f, cold.v, cold.rho);
  CHECK(warm.converged);
  CHECK(warm.iterations <= 2);
  CHECK(warm.rho == doctest::Approx(cold.rho).epsilon(0.02));
}

TEST_CASE("estimate dominates the Rayleigh quotient on symmetric operators") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 6;
    std::vector<double> A(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) A[i * n + j] = A[j * n + i] = gauss(rng);
    const RhsFn f = [&A, n](double, const Vec& y, Vec& out) {
      for (int i = 0; i < n; ++i) {
        out[i] = 0.0;
        for (int j = 0; j < n; ++j) out[i] += A[i * n + j] * y[j];
      }
    };
    Vec y(n);
    for (double& v : y) v = gauss(rng);

    const RhoEstimate est = estimate_spectral_radius(0.0, y, f);

    // Rayleigh quotient along the returned direction
    const double ny = std::sqrt(std::inner_product(y.begin(), y.end(),
                                                   y.begin(), 0.0));
    const double delta = std::max(ny, 1e-8) * 1e-8;
    double nv = 0.0;
    for (double v : est.v) nv += v * v;
    nv = std::sqrt(nv);
    const double q = delta / nv;
    Vec z(n), fy(n), fz(n);
    for (int i = 0; i < n; ++i) z[i] = y[i] + q * est.v[i];
    f(0.0, y, fy);
    f(0.0, z, fz);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      num += (fz[i] - fy[i]) * (z[i] - y[i]);
      den += (z[i] - y[i]) * (z[i] - y[i]);
    }
    CHECK(est.rho / est.safety >= num / den - 1e-8);
  }
}

TEST_CASE("cycling estimate hits the iteration cap") {
  // A = [[0, 2], [0.5, 0]] makes the norm ratio alternate between 0.5 and 2.
  const RhsFn f = [](double, const Vec& y, Vec& out) {
    out[0] = 2.0 * y[1];
    out[1] = 0.5 * y[0];
  };
  const RhoEstimate est =
      estimate_spectral_radius(0.0, Vec{0.0, 0.0}, f, Vec{1.0, 0.0});
  CHECK_FALSE(est.converged);
  CHECK(est.iterations == 50);
}

TEST_CASE("rejects a zero warm-start vector") {
  const RhsFn f = [](double, const Vec& y, Vec& out) { out = y; };
  CHECK_THROWS_AS(estimate_spectral_radius(0.0, Vec{1.0}, f, Vec{0.0}),
                  std::invalid_argument);
}
