#include "mrkc/spectral.hpp"

#include <cmath>
#include <random>

namespace mrkc {

namespace {

double norm2(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Vec seeded_direction(std::size_t n) {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

}  // namespace

RhoEstimate estimate_spectral_radius(double t, const Vec& y, const RhsFn& f,
                                     const Vec& v0, double rho0) {
  constexpr double kEps = 1e-8;
  constexpr double kTol = 1e-2;
  constexpr int kMaxIters = 50;

  const std::size_t n = y.size();
  RhoEstimate est;
  est.v = v0.empty() ? seeded_direction(n) : v0;
  if (norm2(est.v) == 0.0)
    throw std::invalid_argument("estimate_spectral_radius: v0 must be nonzero");

  const double ny = norm2(y);
  const double delta = std::max(ny, kEps) * kEps;

  Vec fy(n), fz(n), z(n);
  f(t, y, fy);

  double rho = rho0;
  double rho_old = 0.0;
  int it = 0;
  while (it == 0 || std::abs(rho - rho_old) >= kTol * rho) {
    if (it >= kMaxIters) {
      est.converged = false;
      break;
    }
    rho_old = rho;
    const double q = delta / norm2(est.v);
    for (std::size_t i = 0; i < n; ++i) z[i] = y[i] + q * est.v[i];
    f(t, z, fz);
    for (std::size_t i = 0; i < n; ++i) est.v[i] = fz[i] - fy[i];
    const double nv = norm2(est.v);
    if (nv < 1e-300) {
      // Locally null operator; avoid dividing by a vanishing direction.
      est.rho = 0.0;
      est.iterations = it + 1;
      return est;
    }
    rho = nv / delta;
    ++it;
  }

  est.rho = rho * est.safety;
  est.iterations = it;
  return est;
}

}  // namespace mrkc
