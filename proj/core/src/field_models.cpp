#include "adiabatic/field_models.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "adiabatic/errors.hpp"

namespace adiabatic {

std::string_view to_string(Coupling c) {
  return c == Coupling::quadratic ? "quadratic" : "well-depth";
}

Coupling parse_coupling(std::string_view s) {
  if (s == "quadratic") return Coupling::quadratic;
  if (s == "well-depth") return Coupling::well_depth;
  throw ConfigError("unknown coupling '" + std::string(s) + "'");
}

namespace {

void check_potential(const Grid1D& grid, const Eigen::VectorXd& v) {
  if (v.size() != 0 && v.size() != grid.num_points()) {
    throw StructuralError("potential has " + std::to_string(v.size()) + " samples, grid has " +
                          std::to_string(grid.num_points()));
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw NumericError("non-finite potential sample", i);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ScalarFieldEnergy

ScalarFieldEnergy::ScalarFieldEnergy(const Grid1D& grid, ScalarFieldParams params)
    : grid_(grid), params_(std::move(params)), laplacian_(grid, params_.stencil_order) {
  check_potential(grid, params_.potential);
  if (params_.epsilon < 0.0) throw ConfigError("epsilon must be nonnegative");
}

double ScalarFieldEnergy::density(double u, int j) const noexcept {
  double w = 0.0;
  switch (params_.well) {
    case Well::none: break;
    case Well::double_well: {
      const double s = 1.0 - u * u;
      w = 0.25 * params_.well_scale * s * s;
      break;
    }
    case Well::harmonic: w = 0.5 * params_.well_scale * u * u; break;
  }
  const double ev = params_.epsilon * potential_at(j);
  if (ev != 0.0) {
    if (params_.coupling == Coupling::quadratic) {
      w += ev * 0.5 * u * u;
    } else {
      const double s = 1.0 - u * u;
      w += ev * 0.25 * s * s;
    }
  }
  return w;
}

double ScalarFieldEnergy::density_prime(double u, int j) const noexcept {
  double w = 0.0;
  switch (params_.well) {
    case Well::none: break;
    case Well::double_well: w = params_.well_scale * (u * u * u - u); break;
    case Well::harmonic: w = params_.well_scale * u; break;
  }
  const double ev = params_.epsilon * potential_at(j);
  if (ev != 0.0) {
    w += ev * (params_.coupling == Coupling::quadratic ? u : u * u * u - u);
  }
  return w;
}

double ScalarFieldEnergy::density_second(double u, int j) const noexcept {
  double w = 0.0;
  switch (params_.well) {
    case Well::none: break;
    case Well::double_well: w = params_.well_scale * (3.0 * u * u - 1.0); break;
    case Well::harmonic: w = params_.well_scale; break;
  }
  const double ev = params_.epsilon * potential_at(j);
  if (ev != 0.0) {
    w += ev * (params_.coupling == Coupling::quadratic ? 1.0 : 3.0 * u * u - 1.0);
  }
  return w;
}

double ScalarFieldEnergy::energy(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  double local = 0.0;
  for (int j = 0; j < grid_.num_points(); ++j) {
    const double d = density(u[j], j);
    if (!std::isfinite(d)) throw NumericError("non-finite energy density", j);
    local += d;
  }
  double e = grid_.spacing() * local;
  if (params_.gradient_coefficient != 0.0) {
    e += params_.gradient_coefficient *
         laplacian_.quadratic_form(u, params_.left_value, params_.right_value);
  }
  if (!std::isfinite(e)) throw NumericError("non-finite gradient energy", -1);
  return e;
}

Eigen::VectorXd ScalarFieldEnergy::gradient(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  Eigen::VectorXd g(grid_.num_points());
  for (int j = 0; j < grid_.num_points(); ++j) {
    g[j] = density_prime(u[j], j);
    if (!std::isfinite(g[j])) throw NumericError("non-finite energy density derivative", j);
  }
  if (params_.gradient_coefficient != 0.0) {
    g += params_.gradient_coefficient *
         laplacian_.apply(u, params_.left_value, params_.right_value);
  }
  return g;
}

Eigen::VectorXd ScalarFieldEnergy::hessian(const Eigen::Ref<const Eigen::VectorXd>& v,
                                           const Eigen::Ref<const Eigen::VectorXd>& w) const {
  Eigen::VectorXd out(grid_.num_points());
  for (int j = 0; j < grid_.num_points(); ++j) {
    const double c = density_second(v[j], j);
    if (!std::isfinite(c)) throw NumericError("non-finite second derivative of density", j);
    out[j] = c * w[j];
  }
  if (params_.gradient_coefficient != 0.0) {
    out += params_.gradient_coefficient * laplacian_.apply(w, 0.0, 0.0);
  }
  return out;
}

Eigen::SparseMatrix<double> ScalarFieldEnergy::linear_matrix() const {
  Eigen::SparseMatrix<double> a = laplacian_.matrix();
  a *= params_.gradient_coefficient;
  return a;
}

double ScalarFieldEnergy::stiffness_bound() const {
  return params_.gradient_coefficient * laplacian_.symbol_max();
}

// ---------------------------------------------------------------------------
// ScalarFieldModel

ScalarFieldModel::ScalarFieldModel(const Grid1D& grid, ScalarFieldParams params)
    : EnergyModel(grid, ModelKind::dissipative),
      field_(grid, std::move(params)),
      linear_(field_.linear_matrix()) {}

double ScalarFieldModel::energy_impl(const StateVector& u) const {
  return field_.energy(u.values());
}

Eigen::VectorXd ScalarFieldModel::gradient_impl(const StateVector& u) const {
  return field_.gradient(u.values());
}

Eigen::VectorXd ScalarFieldModel::hessian_impl(const StateVector& v, const StateVector& w) const {
  return field_.hessian(v.values(), w.values());
}

// ---------------------------------------------------------------------------
// CanonicalPairModel

CanonicalPairModel::CanonicalPairModel(const Grid1D& grid, ScalarFieldParams params)
    : EnergyModel(grid, ModelKind::canonical_pair), field_(grid, std::move(params)) {
  const int n = grid.num_points();
  const Eigen::SparseMatrix<double> a = field_.linear_matrix();
  std::vector<Eigen::Triplet<double>> t;
  for (int k = 0; k < a.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) {
      t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }
  for (int j = 0; j < n; ++j) t.emplace_back(n + j, n + j, 1.0);
  linear_.resize(2 * n, 2 * n);
  linear_.setFromTriplets(t.begin(), t.end());
}

double CanonicalPairModel::stiffness_bound() const {
  return std::max(1.0, field_.stiffness_bound());
}

double CanonicalPairModel::energy_impl(const StateVector& u) const {
  const double kinetic = 0.5 * grid().spacing() * u.second().squaredNorm();
  return field_.energy(u.first()) + kinetic;
}

Eigen::VectorXd CanonicalPairModel::gradient_impl(const StateVector& u) const {
  const int n = grid().num_points();
  Eigen::VectorXd g(2 * n);
  g.head(n) = field_.gradient(u.first());
  g.tail(n) = u.second();
  return g;
}

Eigen::VectorXd CanonicalPairModel::hessian_impl(const StateVector& v,
                                                 const StateVector& w) const {
  const int n = grid().num_points();
  Eigen::VectorXd out(2 * n);
  out.head(n) = field_.hessian(v.first(), w.first());
  out.tail(n) = w.second();
  return out;
}

// ---------------------------------------------------------------------------
// NlsModel

NlsModel::NlsModel(const Grid1D& grid, NlsParams params)
    : EnergyModel(grid, ModelKind::schroedinger),
      params_(std::move(params)),
      laplacian_(grid, params_.stencil_order) {
  if (!grid.periodic()) throw ConfigError("the NLS model requires a periodic grid");
  check_potential(grid, params_.potential);
  if (params_.epsilon < 0.0) throw ConfigError("epsilon must be nonnegative");
  const int n = grid.num_points();
  const Eigen::SparseMatrix<double> a = laplacian_.matrix();
  std::vector<Eigen::Triplet<double>> t;
  for (int k = 0; k < a.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) {
      const int r = static_cast<int>(it.row());
      const int c = static_cast<int>(it.col());
      t.emplace_back(2 * r, 2 * c, it.value());
      t.emplace_back(2 * r + 1, 2 * c + 1, it.value());
    }
  }
  linear_.resize(2 * n, 2 * n);
  linear_.setFromTriplets(t.begin(), t.end());
  stiffness_ = laplacian_.symbol_max();
}

double NlsModel::mass(const StateVector& u) const {
  check_state(u);
  return 0.5 * grid().spacing() * u.values().squaredNorm();
}

double NlsModel::energy_impl(const StateVector& u) const {
  const int n = grid().num_points();
  const double g = params_.nonlinearity;
  double local = 0.0;
  Eigen::VectorXd re(n), im(n);
  for (int j = 0; j < n; ++j) {
    re[j] = u[2 * j];
    im[j] = u[2 * j + 1];
    const double rho = re[j] * re[j] + im[j] * im[j];
    const double d =
        -0.5 * g * rho * rho + 0.5 * (params_.chemical_potential + params_.epsilon * potential_at(j)) * rho;
    if (!std::isfinite(d)) throw NumericError("non-finite energy density", j);
    local += d;
  }
  return grid().spacing() * local + laplacian_.quadratic_form(re, 0.0, 0.0) +
         laplacian_.quadratic_form(im, 0.0, 0.0);
}

std::optional<Eigen::VectorXd> NlsModel::local_phase_rate(const StateVector& u) const {
  check_state(u);
  const int n = grid().num_points();
  Eigen::VectorXd c(n);
  for (int j = 0; j < n; ++j) {
    const double rho = u[2 * j] * u[2 * j] + u[2 * j + 1] * u[2 * j + 1];
    c[j] = -2.0 * params_.nonlinearity * rho + params_.chemical_potential +
           params_.epsilon * potential_at(j);
  }
  return c;
}

Eigen::VectorXd NlsModel::gradient_impl(const StateVector& u) const {
  Eigen::VectorXd g = linear_ * u.values();
  const Eigen::VectorXd c = *local_phase_rate(u);
  for (int j = 0; j < grid().num_points(); ++j) {
    g[2 * j] += c[j] * u[2 * j];
    g[2 * j + 1] += c[j] * u[2 * j + 1];
    if (!std::isfinite(g[2 * j]) || !std::isfinite(g[2 * j + 1])) {
      throw NumericError("non-finite gradient", j);
    }
  }
  return g;
}

Eigen::VectorXd NlsModel::hessian_impl(const StateVector& v, const StateVector& w) const {
  Eigen::VectorXd out = linear_ * w.values();
  const double g = params_.nonlinearity;
  for (int j = 0; j < grid().num_points(); ++j) {
    const double vr = v[2 * j], vi = v[2 * j + 1];
    const double wr = w[2 * j], wi = w[2 * j + 1];
    const double rho = vr * vr + vi * vi;
    const double cross = vr * wr + vi * wi;  // Re(conj(v) w)
    const double lin = params_.chemical_potential + params_.epsilon * potential_at(j) - 2.0 * g * rho;
    out[2 * j] += lin * wr - 4.0 * g * cross * vr;
    out[2 * j + 1] += lin * wi - 4.0 * g * cross * vi;
  }
  return out;
}

}  // namespace adiabatic
