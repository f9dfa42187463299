#pragma once

// Structured-grid finite-difference discretization of the monodomain
// reaction-diffusion model: matrix-free anisotropic diffusion with zero-flux
// Neumann boundaries, the stimulus protocol, and assembly of the
// fast / slow / exponential splitting of the right-hand side.

#include <array>
#include <memory>
#include <span>

#include "mrkc/core.hpp"
#include "mrkc/ionic.hpp"

namespace mrkc {

// Uniform tensor-product grid of nodes at i*dx covering [0, extent] per axis.
// Extents must be exact multiples of the spacing.
struct Grid {
  int dim = 1;
  std::array<double, 3> extent{};  // [mm]
  std::array<double, 3> dx{};      // [mm]
  std::array<long, 3> n{1, 1, 1};  // nodes per axis (1 on unused axes)
  long n_nodes = 0;
};

Grid make_grid(int dim, std::span<const double> extent,
               std::span<const double> dx);

// Node coordinate along an axis; node weight is the tensor-product
// trapezoid weight (1/2 per boundary face hit).
double node_coord(const Grid& g, long node, int axis);
Vec quadrature_weights(const Grid& g);

// Axis-aligned conductivities, each the harmonic combination of the intra-
// and extracellular values, plus the surface-to-volume ratio and membrane
// capacitance. Defaults follow the standard monodomain benchmark set.
struct Conductivity {
  std::array<double, 3> sigma{};  // [mS/mm] along fiber/sheet/normal axes
  double chi = 140.0;             // [1/mm]
  double C_m = 0.01;              // [uF/mm^2]

  static double harmonic(double sigma_i, double sigma_e) {
    return sigma_i * sigma_e / (sigma_i + sigma_e);
  }
  static Conductivity defaults();
};

// Block layout of the per-node unknowns: all V, then each gate at all
// nodes, then each auxiliary variable at all nodes.
struct StateLayout {
  long n_nodes = 0;
  int n_gates = 0;
  int n_aux = 0;

  long size() const { return n_nodes * (1 + n_gates + n_aux); }
  long v_offset() const { return 0; }
  long gate_offset(int g) const { return n_nodes * (1 + g); }
  long aux_offset(int a) const { return n_nodes * (1 + n_gates + a); }
};

// Box-shaped stimulus: chi*I_stim [uA/mm^3] applied at every node inside
// the box while t is inside the window.
struct StimulusProtocol {
  double chi_amplitude = 0.0;
  std::array<double, 3> box_lo{};
  std::array<double, 3> box_hi{};
  double t_start = 0.0;
  double t_end = 0.0;

  bool active_at(double t) const { return t >= t_start && t <= t_end; }
};

// Scaled diffusion (chi C_m)^{-1} div(D grad V) with second-order central
// stencils and even-reflection ghost nodes (zero-flux Neumann). out is
// overwritten.
void diffusion_apply(const Grid& g, const Conductivity& c,
                     std::span<const double> V, std::span<double> out);

// Relative L2 error ||a - b|| / ||b|| under the lumped (trapezoid)
// quadrature. Throws if ||b|| = 0.
double rel_l2_error(std::span<const double> a, std::span<const double> b,
                    const Grid& g);
double l2_norm(std::span<const double> u, const Grid& g);

// Closed-form spectral radius of the scaled diffusion stencil:
// sum over axes of 4 sigma_a / (chi C_m dx_a^2) * sin^2((N_a-1) pi / (2 N_a)).
double analytic_rho_F(const Grid& g, const Conductivity& c);

// Problem interface the steppers and baselines are written against; the
// grid-based operator below implements it, and tests substitute scalar
// surrogates.
class MonodomainProblem {
public:
  virtual ~MonodomainProblem() = default;

  virtual const StateLayout& layout() const = 0;
  virtual Vec node_weights() const = 0;  // trapezoid weights, size n_nodes

  // Diffusion on the V block only.
  virtual void apply_diffusion(std::span<const double> V,
                               std::span<double> out) const = 0;

  // (chi I_stim(t))/(chi C_m) - I_ion(V, z_E, z_S)/C_m per node.
  virtual void v_reaction(double t, const Vec& y,
                          std::span<double> out) const = 0;

  // Lambda_E(V) and z_inf(V) for every gate at every node, laid out like
  // the gating block of the state.
  virtual void gate_coeffs_field(const Vec& y, std::span<double> lambda,
                                 std::span<double> z_inf) const = 0;

  // g_S for every auxiliary variable at every node.
  virtual void aux_rates_field(const Vec& y, std::span<double> out) const = 0;
};

// Matrix-free monodomain operator on a structured grid with pointwise
// (nodal) evaluation of the ionic terms.
class MonodomainOperator final : public MonodomainProblem {
public:
  MonodomainOperator(Grid grid, Conductivity cond,
                     std::shared_ptr<const IonicModel> model,
                     StimulusProtocol stimulus);

  const StateLayout& layout() const override { return layout_; }
  Vec node_weights() const override;
  void apply_diffusion(std::span<const double> V,
                       std::span<double> out) const override;
  void v_reaction(double t, const Vec& y,
                  std::span<double> out) const override;
  void gate_coeffs_field(const Vec& y, std::span<double> lambda,
                         std::span<double> z_inf) const override;
  void aux_rates_field(const Vec& y, std::span<double> out) const override;

  // Operator splitting of the full right-hand side:
  //   f_F: diffusion on the V block, zero elsewhere
  //   f_S: stimulus/ionic reaction on V, g_S on the auxiliary block
  //   f_E: Lambda_E(V)(z_E - z_inf(V)) on the gating block
  void f_F(double t, const Vec& y, Vec& out) const;
  void f_S(double t, const Vec& y, Vec& out) const;
  void f_E(double t, const Vec& y, Vec& out) const;

  // State-shaped Lambda and y_inf (zero outside the gating block).
  void exp_part(const Vec& y, Vec& lambda, Vec& y_inf) const;

  // Monolithic right-hand side assembled in one pass, with the gating rows
  // in the alpha(1-z) - beta z form. Independent of the split callbacks.
  void rhs(double t, const Vec& y, Vec& out) const;

  // Stiff-gate splitting: the listed gates move from f_E into the fast
  // term, the remaining ones into the slow term.
  void f_F_with_gates(std::span<const int> stiff_gates, double t, const Vec& y,
                      Vec& out) const;
  void f_S_with_gates(std::span<const int> stiff_gates, double t, const Vec& y,
                      Vec& out) const;

  double stimulus_rate(double t, long node) const;  // [mV/ms] on the V block

  const Grid& grid() const { return grid_; }
  const Conductivity& conductivity() const { return cond_; }
  const IonicModel& model() const { return *model_; }
  const StimulusProtocol& stimulus() const { return stim_; }

  // Uniform resting initial state.
  Vec initial_state() const;

private:
  void check_size(const Vec& y) const;
  void gate_rows(const Vec& y, Vec& out, std::span<const int> gates) const;

  Grid grid_;
  Conductivity cond_;
  std::shared_ptr<const IonicModel> model_;
  StimulusProtocol stim_;
  StateLayout layout_;
};

MonodomainOperator build_problem(Grid grid, Conductivity cond,
                                 std::shared_ptr<const IonicModel> model,
                                 StimulusProtocol stimulus);

}  // namespace mrkc
