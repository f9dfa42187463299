#include "mrkc/monodomain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mrkc {

Grid make_grid(int dim, std::span<const double> extent,
               std::span<const double> dx) {
  if (dim < 1 || dim > 3) throw ConfigError("grid: dim must be 1, 2, or 3");
  if (extent.size() < static_cast<std::size_t>(dim) ||
      dx.size() < static_cast<std::size_t>(dim))
    throw ConfigError("grid: extent/dx need one value per axis");

  Grid g;
  g.dim = dim;
  g.n_nodes = 1;
  for (int a = 0; a < dim; ++a) {
    if (!(extent[a] > 0.0) || !(dx[a] > 0.0))
      throw ConfigError("grid: extent and dx must be positive");
    const double cells = extent[a] / dx[a];
    const long nc = std::lround(cells);
    if (nc < 1 || std::abs(cells - static_cast<double>(nc)) > 1e-9 * cells)
      throw ConfigError("grid: extent must be an exact multiple of dx");
    g.extent[a] = extent[a];
    g.dx[a] = dx[a];
    g.n[a] = nc + 1;
    g.n_nodes *= g.n[a];
  }
  return g;
}

namespace {

long axis_stride(const Grid& g, int axis) {
  long s = 1;
  for (int a = 0; a < axis; ++a) s *= g.n[a];
  return s;
}

long axis_index(const Grid& g, long node, int axis) {
  return (node / axis_stride(g, axis)) % g.n[axis];
}

}  // namespace

double node_coord(const Grid& g, long node, int axis) {
  return static_cast<double>(axis_index(g, node, axis)) * g.dx[axis];
}

Vec quadrature_weights(const Grid& g) {
  Vec w(g.n_nodes, 1.0);
  for (int a = 0; a < g.dim; ++a) {
    const long stride = axis_stride(g, a);
    const long na = g.n[a];
    for (long i = 0; i < g.n_nodes; ++i) {
      const long ia = (i / stride) % na;
      if (ia == 0 || ia == na - 1) w[i] *= 0.5;
    }
  }
  return w;
}

Conductivity Conductivity::defaults() {
  Conductivity c;
  c.sigma[0] = harmonic(0.17, 0.62);
  c.sigma[1] = harmonic(0.019, 0.24);
  c.sigma[2] = harmonic(0.019, 0.24);
  return c;
}

void diffusion_apply(const Grid& g, const Conductivity& c,
                     std::span<const double> V, std::span<double> out) {
  if (V.size() != static_cast<std::size_t>(g.n_nodes) || out.size() != V.size())
    throw std::invalid_argument("diffusion_apply: field size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (int a = 0; a < g.dim; ++a) {
    const double w = c.sigma[a] / (c.chi * c.C_m * g.dx[a] * g.dx[a]);
    const long stride = axis_stride(g, a);
    const long na = g.n[a];
    for (long i = 0; i < g.n_nodes; ++i) {
      const long ia = (i / stride) % na;
      // Even reflection about the boundary node: ghost = inner neighbor.
      const double vm = (ia > 0) ? V[i - stride] : V[i + stride];
      const double vp = (ia < na - 1) ? V[i + stride] : V[i - stride];
      out[i] += w * (vp - 2.0 * V[i] + vm);
    }
  }
}

double l2_norm(std::span<const double> u, const Grid& g) {
  const Vec w = quadrature_weights(g);
  double cell = 1.0;
  for (int a = 0; a < g.dim; ++a) cell *= g.dx[a];
  double s = 0.0;
  for (long i = 0; i < g.n_nodes; ++i) s += w[i] * u[i] * u[i];
  return std::sqrt(cell * s);
}

double rel_l2_error(std::span<const double> a, std::span<const double> b,
                    const Grid& g) {
  if (a.size() != b.size() || a.size() != static_cast<std::size_t>(g.n_nodes))
    throw std::invalid_argument("rel_l2_error: field size mismatch");
  Vec diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const double nb = l2_norm(b, g);
  if (nb == 0.0) throw std::invalid_argument("rel_l2_error: ||b|| is zero");
  return l2_norm(diff, g) / nb;
}

double analytic_rho_F(const Grid& g, const Conductivity& c) {
  double rho = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    const double w = c.sigma[a] / (c.chi * c.C_m * g.dx[a] * g.dx[a]);
    const double na = static_cast<double>(g.n[a]);
    const double s = std::sin((na - 1.0) * std::numbers::pi / (2.0 * na));
    rho += 4.0 * w * s * s;
  }
  return rho;
}

MonodomainOperator::MonodomainOperator(Grid grid, Conductivity cond,
                                       std::shared_ptr<const IonicModel> model,
                                       StimulusProtocol stimulus)
    : grid_(grid), cond_(cond), model_(std::move(model)), stim_(stimulus) {
  if (!model_) throw std::invalid_argument("MonodomainOperator: null model");
  layout_ = StateLayout{grid_.n_nodes, model_->n_gates(), model_->n_aux()};
}

MonodomainOperator build_problem(Grid grid, Conductivity cond,
                                 std::shared_ptr<const IonicModel> model,
                                 StimulusProtocol stimulus) {
  return MonodomainOperator(grid, cond, std::move(model), stimulus);
}

void MonodomainOperator::check_size(const Vec& y) const {
  if (y.size() != static_cast<std::size_t>(layout_.size()))
    throw std::invalid_argument("MonodomainOperator: state size mismatch");
}

Vec MonodomainOperator::node_weights() const {
  return quadrature_weights(grid_);
}

void MonodomainOperator::apply_diffusion(std::span<const double> V,
                                         std::span<double> out) const {
  diffusion_apply(grid_, cond_, V, out);
}

double MonodomainOperator::stimulus_rate(double t, long node) const {
  if (stim_.chi_amplitude == 0.0 || !stim_.active_at(t)) return 0.0;
  for (int a = 0; a < grid_.dim; ++a) {
    const double x = node_coord(grid_, node, a);
    if (x < stim_.box_lo[a] - 1e-12 || x > stim_.box_hi[a] + 1e-12) return 0.0;
  }
  return stim_.chi_amplitude / (cond_.chi * cond_.C_m);
}

void MonodomainOperator::v_reaction(double t, const Vec& y,
                                    std::span<double> out) const {
  check_size(y);
  const long nn = layout_.n_nodes;
  const int ng = layout_.n_gates;
  const int na = layout_.n_aux;
  std::vector<double> ze(ng), zs(na);
  for (long i = 0; i < nn; ++i) {
    for (int g = 0; g < ng; ++g) ze[g] = y[layout_.gate_offset(g) + i];
    for (int a = 0; a < na; ++a) zs[a] = y[layout_.aux_offset(a) + i];
    out[i] = stimulus_rate(t, i) -
             model_->ionic_current(y[i], ze, zs) / cond_.C_m;
  }
}

void MonodomainOperator::gate_coeffs_field(const Vec& y,
                                           std::span<double> lambda,
                                           std::span<double> z_inf) const {
  check_size(y);
  const long nn = layout_.n_nodes;
  const int ng = layout_.n_gates;
  std::vector<double> lam(ng), zi(ng);
  for (long i = 0; i < nn; ++i) {
    model_->gate_coeffs(y[i], lam, zi);
    for (int g = 0; g < ng; ++g) {
      lambda[g * nn + i] = lam[g];
      z_inf[g * nn + i] = zi[g];
    }
  }
}

void MonodomainOperator::aux_rates_field(const Vec& y,
                                         std::span<double> out) const {
  check_size(y);
  const long nn = layout_.n_nodes;
  const int ng = layout_.n_gates;
  const int na = layout_.n_aux;
  if (na == 0) return;
  std::vector<double> ze(ng), zs(na), gs(na);
  for (long i = 0; i < nn; ++i) {
    for (int g = 0; g < ng; ++g) ze[g] = y[layout_.gate_offset(g) + i];
    for (int a = 0; a < na; ++a) zs[a] = y[layout_.aux_offset(a) + i];
    model_->aux_rates(y[i], ze, zs, gs);
    for (int a = 0; a < na; ++a) out[a * nn + i] = gs[a];
  }
}

void MonodomainOperator::f_F(double, const Vec& y, Vec& out) const {
  check_size(y);
  out.assign(layout_.size(), 0.0);
  apply_diffusion(std::span(y).subspan(0, layout_.n_nodes),
                  std::span(out).subspan(0, layout_.n_nodes));
}

void MonodomainOperator::f_S(double t, const Vec& y, Vec& out) const {
  check_size(y);
  out.assign(layout_.size(), 0.0);
  v_reaction(t, y, std::span(out).subspan(0, layout_.n_nodes));
  if (layout_.n_aux > 0)
    aux_rates_field(y, std::span(out).subspan(layout_.aux_offset(0),
                                              layout_.n_nodes * layout_.n_aux));
}

void MonodomainOperator::gate_rows(const Vec& y, Vec& out,
                                   std::span<const int> gates) const {
  const long nn = layout_.n_nodes;
  const int ng = layout_.n_gates;
  if (gates.empty()) return;
  std::vector<double> lam(ng), zi(ng);
  for (long i = 0; i < nn; ++i) {
    model_->gate_coeffs(y[i], lam, zi);
    for (int g : gates) {
      const long k = layout_.gate_offset(g) + i;
      out[k] = lam[g] * (y[k] - zi[g]);
    }
  }
}

void MonodomainOperator::f_E(double, const Vec& y, Vec& out) const {
  check_size(y);
  out.assign(layout_.size(), 0.0);
  std::vector<int> all(layout_.n_gates);
  for (int g = 0; g < layout_.n_gates; ++g) all[g] = g;
  gate_rows(y, out, all);
}

void MonodomainOperator::exp_part(const Vec& y, Vec& lambda,
                                  Vec& y_inf) const {
  check_size(y);
  lambda.assign(layout_.size(), 0.0);
  y_inf.assign(layout_.size(), 0.0);
  if (layout_.n_gates == 0) return;
  const long nn = layout_.n_nodes;
  gate_coeffs_field(
      y, std::span(lambda).subspan(layout_.gate_offset(0), nn * layout_.n_gates),
      std::span(y_inf).subspan(layout_.gate_offset(0), nn * layout_.n_gates));
}

void MonodomainOperator::rhs(double t, const Vec& y, Vec& out) const {
  check_size(y);
  out.assign(layout_.size(), 0.0);
  const long nn = layout_.n_nodes;
  const int ng = layout_.n_gates;
  const int na = layout_.n_aux;

  apply_diffusion(std::span(y).subspan(0, nn), std::span(out).subspan(0, nn));

  std::vector<double> alpha(ng), beta(ng), ze(ng), zs(na), gs(na);
  for (long i = 0; i < nn; ++i) {
    const double V = y[i];
    for (int g = 0; g < ng; ++g) ze[g] = y[layout_.gate_offset(g) + i];
    for (int a = 0; a < na; ++a) zs[a] = y[layout_.aux_offset(a) + i];

    out[i] += stimulus_rate(t, i) - model_->ionic_current(V, ze, zs) / cond_.C_m;

    model_->rates(V, alpha, beta);
    for (int g = 0; g < ng; ++g)
      out[layout_.gate_offset(g) + i] =
          alpha[g] * (1.0 - ze[g]) - beta[g] * ze[g];

    if (na > 0) {
      model_->aux_rates(V, ze, zs, gs);
      for (int a = 0; a < na; ++a) out[layout_.aux_offset(a) + i] = gs[a];
    }
  }
}

void MonodomainOperator::f_F_with_gates(std::span<const int> stiff_gates,
                                        double t, const Vec& y,
                                        Vec& out) const {
  f_F(t, y, out);
  gate_rows(y, out, stiff_gates);
}

void MonodomainOperator::f_S_with_gates(std::span<const int> stiff_gates,
                                        double t, const Vec& y,
                                        Vec& out) const {
  f_S(t, y, out);
  std::vector<int> rest;
  for (int g = 0; g < layout_.n_gates; ++g)
    if (std::find(stiff_gates.begin(), stiff_gates.end(), g) ==
        stiff_gates.end())
      rest.push_back(g);
  gate_rows(y, out, rest);
}

Vec MonodomainOperator::initial_state() const {
  const IonicModel::Rest rest = model_->resting_state();
  Vec y(layout_.size());
  const long nn = layout_.n_nodes;
  for (long i = 0; i < nn; ++i) y[i] = rest.V;
  for (int g = 0; g < layout_.n_gates; ++g)
    for (long i = 0; i < nn; ++i) y[layout_.gate_offset(g) + i] = rest.z_E[g];
  for (int a = 0; a < layout_.n_aux; ++a)
    for (long i = 0; i < nn; ++i)
      y[layout_.aux_offset(a) + i] = a < static_cast<int>(rest.z_S.size())
                                         ? rest.z_S[a]
                                         : 0.0;
  return y;
}

}  // namespace mrkc
