#pragma once

#include <Eigen/Sparse>

#include <optional>
#include <string_view>

#include "adiabatic/grid.hpp"
#include "adiabatic/state_vector.hpp"

namespace adiabatic {

/// Type of the evolution du/dt = J E'(u).
///
///  - dissipative:    J = -1 (gradient flow)
///  - schroedinger:   J = multiplication by -i
///  - canonical_pair: J(u1, u2) = (u2, -u1)
enum class ModelKind { dissipative, schroedinger, canonical_pair };

std::string_view to_string(ModelKind k);
ModelKind parse_model_kind(std::string_view s);
ValueKind value_kind_for(ModelKind k) noexcept;
inline bool is_symplectic(ModelKind k) noexcept { return k != ModelKind::dissipative; }

/// Energy functional E on a discretized configuration space.
///
/// Gradients are Riesz representatives in the discrete L2 inner product, so
/// <gradient(u), h> is the directional derivative of energy at u along h.
/// Every model splits its gradient as A u + m(u), with A the symmetric sparse
/// matrix returned by linear_part() and m a node-local (possibly affine) map;
/// implicit steppers treat A implicitly.
class EnergyModel {
 public:
  EnergyModel(const Grid1D& grid, ModelKind kind) : grid_(grid), kind_(kind) {}
  virtual ~EnergyModel() = default;

  EnergyModel(const EnergyModel&) = delete;
  EnergyModel& operator=(const EnergyModel&) = delete;

  const Grid1D& grid() const noexcept { return grid_; }
  ModelKind kind() const noexcept { return kind_; }
  ValueKind value_kind() const noexcept { return value_kind_for(kind_); }

  StateVector zero_state() const { return StateVector(grid_, value_kind()); }

  double energy(const StateVector& u) const;
  StateVector gradient(const StateVector& u) const;
  /// L_v w with L_v = E''(v).
  StateVector hessian_apply(const StateVector& v, const StateVector& w) const;

  virtual const Eigen::SparseMatrix<double>& linear_part() const = 0;

  /// Upper bound on the spectrum of linear_part(), used for explicit CFL limits.
  virtual double stiffness_bound() const = 0;

  /// For Schroedinger models whose local gradient is c(x, |psi|) psi with real
  /// c: returns c per node. Enables the split-step scheme.
  virtual std::optional<Eigen::VectorXd> local_phase_rate(const StateVector&) const {
    return std::nullopt;
  }

  /// Throws StructuralError unless u matches this model's grid and value kind.
  void check_state(const StateVector& u) const;

 protected:
  virtual double energy_impl(const StateVector& u) const = 0;
  virtual Eigen::VectorXd gradient_impl(const StateVector& u) const = 0;
  virtual Eigen::VectorXd hessian_impl(const StateVector& v, const StateVector& w) const = 0;

 private:
  Grid1D grid_;
  ModelKind kind_;
};

StateVector apply_J(const EnergyModel& model, const StateVector& h);
StateVector apply_J_inverse(const EnergyModel& model, const StateVector& h);

/// J as a sparse matrix acting on the storage layout of `kind`.
Eigen::SparseMatrix<double> structure_matrix(ModelKind kind, const Grid1D& grid);

/// N_v(w) = E'(v + w) - E'(v) - L_v w.
StateVector nonlinear_remainder(const EnergyModel& model, const StateVector& v,
                                const StateVector& w);

/// R_v(w) = E(v + w) - E(v) - <E'(v), w> - 1/2 <L_v w, w>.
double quadratic_remainder(const EnergyModel& model, const StateVector& v, const StateVector& w);

}  // namespace adiabatic
