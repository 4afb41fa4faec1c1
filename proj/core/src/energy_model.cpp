#include "adiabatic/energy_model.hpp"

#include <string>
#include <vector>

#include "adiabatic/errors.hpp"

namespace adiabatic {

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::dissipative: return "dissipative";
    case ModelKind::schroedinger: return "schroedinger";
    case ModelKind::canonical_pair: return "canonical-pair";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view s) {
  if (s == "dissipative") return ModelKind::dissipative;
  if (s == "schroedinger") return ModelKind::schroedinger;
  if (s == "canonical-pair") return ModelKind::canonical_pair;
  throw ConfigError("unknown model kind '" + std::string(s) + "'");
}

ValueKind value_kind_for(ModelKind k) noexcept {
  switch (k) {
    case ModelKind::dissipative: return ValueKind::real;
    case ModelKind::schroedinger: return ValueKind::complex;
    case ModelKind::canonical_pair: return ValueKind::pair;
  }
  return ValueKind::real;
}

void EnergyModel::check_state(const StateVector& u) const {
  if (!(u.grid() == grid_)) throw StructuralError("state grid does not match model grid");
  if (u.kind() != value_kind()) {
    throw StructuralError("state kind " + std::string(to_string(u.kind())) +
                          " incompatible with model kind " + std::string(to_string(kind_)));
  }
}

double EnergyModel::energy(const StateVector& u) const {
  check_state(u);
  return energy_impl(u);
}

StateVector EnergyModel::gradient(const StateVector& u) const {
  check_state(u);
  return StateVector(grid_, value_kind(), gradient_impl(u));
}

StateVector EnergyModel::hessian_apply(const StateVector& v, const StateVector& w) const {
  check_state(v);
  check_state(w);
  return StateVector(grid_, value_kind(), hessian_impl(v, w));
}

StateVector apply_J(const EnergyModel& model, const StateVector& h) {
  model.check_state(h);
  StateVector out = h.zeros_like();
  const int n = h.grid().num_points();
  switch (model.kind()) {
    case ModelKind::dissipative:
      out.values() = -h.values();
      break;
    case ModelKind::schroedinger:
      // -i (a + ib) = b - ia
      for (int j = 0; j < n; ++j) {
        out[2 * j] = h[2 * j + 1];
        out[2 * j + 1] = -h[2 * j];
      }
      break;
    case ModelKind::canonical_pair:
      out.first() = h.second();
      out.second() = -h.first();
      break;
  }
  return out;
}

StateVector apply_J_inverse(const EnergyModel& model, const StateVector& h) {
  model.check_state(h);
  StateVector out = h.zeros_like();
  const int n = h.grid().num_points();
  switch (model.kind()) {
    case ModelKind::dissipative:
      out.values() = -h.values();
      break;
    case ModelKind::schroedinger:
      // i (a + ib) = -b + ia
      for (int j = 0; j < n; ++j) {
        out[2 * j] = -h[2 * j + 1];
        out[2 * j + 1] = h[2 * j];
      }
      break;
    case ModelKind::canonical_pair:
      out.first() = -h.second();
      out.second() = h.first();
      break;
  }
  return out;
}

Eigen::SparseMatrix<double> structure_matrix(ModelKind kind, const Grid1D& grid) {
  const int n = grid.num_points();
  const int size = n * components(value_kind_for(kind));
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(size);
  switch (kind) {
    case ModelKind::dissipative:
      for (int i = 0; i < n; ++i) t.emplace_back(i, i, -1.0);
      break;
    case ModelKind::schroedinger:
      for (int j = 0; j < n; ++j) {
        t.emplace_back(2 * j, 2 * j + 1, 1.0);
        t.emplace_back(2 * j + 1, 2 * j, -1.0);
      }
      break;
    case ModelKind::canonical_pair:
      for (int j = 0; j < n; ++j) {
        t.emplace_back(j, n + j, 1.0);
        t.emplace_back(n + j, j, -1.0);
      }
      break;
  }
  Eigen::SparseMatrix<double> m(size, size);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

StateVector nonlinear_remainder(const EnergyModel& model, const StateVector& v,
                                const StateVector& w) {
  StateVector r = model.gradient(v + w);
  r -= model.gradient(v);
  r -= model.hessian_apply(v, w);
  return r;
}

double quadratic_remainder(const EnergyModel& model, const StateVector& v, const StateVector& w) {
  const double e_vw = model.energy(v + w);
  const double e_v = model.energy(v);
  const double lin = inner_product(model.gradient(v), w);
  const double quad = 0.5 * inner_product(model.hessian_apply(v, w), w);
  return e_vw - e_v - lin - quad;
}

}  // namespace adiabatic
