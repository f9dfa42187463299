#pragma once

// Ionic-model interface in the Hodgkin-Huxley formalism: per-gate rate
// functions alpha/beta (equivalently Lambda = -(alpha+beta) and
// z_inf = alpha/(alpha+beta)), the membrane current, slow auxiliary
// dynamics, and the resting state.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mrkc/core.hpp"

namespace mrkc {

class IonicModel {
public:
  virtual ~IonicModel() = default;

  virtual std::string name() const = 0;
  virtual int n_gates() const = 0;
  virtual int n_aux() const = 0;
  // Labels for the gating variables, then the auxiliary ones.
  virtual std::vector<std::string> var_names() const = 0;

  // Transition rates at membrane potential V [mV]; alpha/beta have n_gates
  // entries, in 1/ms. Both are >= 0 on the physiological range.
  virtual void rates(double V, std::span<double> alpha,
                     std::span<double> beta) const = 0;

  // Total membrane current density [uA/mm^2].
  virtual double ionic_current(double V, std::span<const double> z_E,
                               std::span<const double> z_S) const = 0;

  // Dynamics of the auxiliary variables (g_S); no-op when n_aux == 0.
  virtual void aux_rates(double V, std::span<const double> z_E,
                         std::span<const double> z_S,
                         std::span<double> out) const;

  struct Rest {
    double V = 0.0;
    Vec z_E;
    Vec z_S;
  };
  // Equilibrium: V0 solves the steady-state current equation, z_E = z_inf(V0).
  // The default assumes n_aux == 0 and root-finds by bisection near -65 mV.
  virtual Rest resting_state() const;

  // Convenience: lambda = -(alpha+beta), z_inf = alpha/(alpha+beta).
  void gate_coeffs(double V, std::span<double> lambda,
                   std::span<double> z_inf) const;
};

// The Hodgkin-Huxley 1952 squid-axon model in the modern membrane-potential
// convention, with conductances in mS/mm^2 and potentials in mV.
std::unique_ptr<IonicModel> make_hh_model();

// Model lookup by config name ("hh"). Throws ConfigError on unknown names.
std::unique_ptr<IonicModel> make_ionic_model(const std::string& name);

// Ranks gates by max |Lambda_g(V)| = alpha_g(V) + beta_g(V) over the
// supplied membrane-potential samples (exact, since Lambda is diagonal).
// Stiffest gate first; a splitting typically takes the top one.
std::vector<int> identify_stiff_gates(const IonicModel& model,
                                      std::span<const double> V_samples);

}  // namespace mrkc
