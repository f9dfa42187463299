#include "mrkc/ionic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mrkc {

namespace {

// x / (1 - e^{-x/k}): the linear-over-exponential form appearing in the
// alpha_m and alpha_n rates. Series for small x/k avoids the removable
// singularity at x = 0.
double lin_exp_ratio(double x, double k) {
  const double u = x / k;
  if (std::abs(u) < 1e-4) {
    // u/(1 - e^{-u}) = 1 + u/2 + u^2/12 - u^4/720 + ...
    return k * (1.0 + u * (0.5 + u / 12.0));
  }
  return x / (1.0 - std::exp(-u));
}

}  // namespace

void IonicModel::aux_rates(double, std::span<const double>,
                           std::span<const double>,
                           std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
}

void IonicModel::gate_coeffs(double V, std::span<double> lambda,
                             std::span<double> z_inf) const {
  const int ng = n_gates();
  std::vector<double> alpha(ng), beta(ng);
  rates(V, alpha, beta);
  for (int g = 0; g < ng; ++g) {
    lambda[g] = -(alpha[g] + beta[g]);
    z_inf[g] = alpha[g] / (alpha[g] + beta[g]);
  }
}

IonicModel::Rest IonicModel::resting_state() const {
  if (n_aux() != 0)
    throw std::logic_error(
        "resting_state: default implementation requires n_aux == 0");
  const int ng = n_gates();
  std::vector<double> lam(ng), zinf(ng);

  const auto steady_current = [&](double V) {
    gate_coeffs(V, lam, zinf);
    return ionic_current(V, zinf, {});
  };

  // Steady total current crosses zero near the resting potential; bracket
  // and bisect to machine precision.
  double lo = -90.0, hi = -40.0;
  double flo = steady_current(lo), fhi = steady_current(hi);
  if (flo * fhi > 0.0)
    throw std::runtime_error("resting_state: no sign change in [-90, -40] mV");
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = steady_current(mid);
    if (flo * fm <= 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }

  Rest rest;
  rest.V = 0.5 * (lo + hi);
  rest.z_E.resize(ng);
  gate_coeffs(rest.V, lam, rest.z_E);
  return rest;
}

namespace {

class HodgkinHuxley final : public IonicModel {
public:
  // Conductances [mS/mm^2] and reversal potentials [mV] scaled to the
  // mm-based unit system (C_m = 0.01 uF/mm^2), preserving the classical
  // g/C ratios.
  static constexpr double kGNa = 1.2;
  static constexpr double kGK = 0.36;
  static constexpr double kGLeak = 0.003;
  static constexpr double kVNa = 50.0;
  static constexpr double kVK = -77.0;
  static constexpr double kVLeak = -54.387;

  std::string name() const override { return "hh"; }
  int n_gates() const override { return 3; }
  int n_aux() const override { return 0; }
  std::vector<std::string> var_names() const override { return {"m", "h", "n"}; }

  void rates(double V, std::span<double> alpha,
             std::span<double> beta) const override {
    // m
    alpha[0] = 0.1 * lin_exp_ratio(V + 40.0, 10.0);
    beta[0] = 4.0 * std::exp(-(V + 65.0) / 18.0);
    // h
    alpha[1] = 0.07 * std::exp(-(V + 65.0) / 20.0);
    beta[1] = 1.0 / (1.0 + std::exp(-(V + 35.0) / 10.0));
    // n
    alpha[2] = 0.01 * lin_exp_ratio(V + 55.0, 10.0);
    beta[2] = 0.125 * std::exp(-(V + 65.0) / 80.0);
  }

  double ionic_current(double V, std::span<const double> z_E,
                       std::span<const double>) const override {
    const double m = z_E[0], h = z_E[1], n = z_E[2];
    return kGNa * m * m * m * h * (V - kVNa) + kGK * n * n * n * n * (V - kVK) +
           kGLeak * (V - kVLeak);
  }
};

}  // namespace

std::unique_ptr<IonicModel> make_hh_model() {
  return std::make_unique<HodgkinHuxley>();
}

std::unique_ptr<IonicModel> make_ionic_model(const std::string& name) {
  if (name == "hh") return make_hh_model();
  throw ConfigError("unknown ionic model: " + name);
}

std::vector<int> identify_stiff_gates(const IonicModel& model,
                                      std::span<const double> V_samples) {
  if (V_samples.empty())
    throw std::invalid_argument("identify_stiff_gates: empty trajectory");
  const int ng = model.n_gates();
  std::vector<double> alpha(ng), beta(ng), max_rate(ng, 0.0);
  for (double V : V_samples) {
    model.rates(V, alpha, beta);
    for (int g = 0; g < ng; ++g)
      max_rate[g] = std::max(max_rate[g], alpha[g] + beta[g]);
  }
  std::vector<int> order(ng);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return max_rate[a] > max_rate[b]; });
  return order;
}

}  // namespace mrkc
