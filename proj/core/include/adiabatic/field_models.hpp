#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <string_view>

#include "adiabatic/energy_model.hpp"
#include "adiabatic/stencil.hpp"

namespace adiabatic {

/// Local self-interaction W(u) of a real scalar field.
enum class Well {
  none,         // W = 0
  double_well,  // W = scale/4 (1 - u^2)^2
  harmonic,     // W = scale/2 u^2
};

/// How an external profile V(x) couples to a real field: eps V(x) rho(u).
enum class Coupling {
  quadratic,   // rho = u^2 / 2
  well_depth,  // rho = (1 - u^2)^2 / 4
};

std::string_view to_string(Coupling c);
Coupling parse_coupling(std::string_view s);

struct ScalarFieldParams {
  double gradient_coefficient = 1.0;  // kappa in kappa/2 |u'|^2
  Well well = Well::double_well;
  double well_scale = 1.0;
  double left_value = 0.0;   // Dirichlet ghost values
  double right_value = 0.0;
  double epsilon = 0.0;
  Eigen::VectorXd potential;  // V at grid nodes; empty means V = 0
  Coupling coupling = Coupling::quadratic;
  int stencil_order = 6;
};

/// E(u) = int kappa/2 |u'|^2 + W(u) + eps V(x) rho(u) on a real field.
/// Shared by the dissipative model and the first component of canonical pairs.
class ScalarFieldEnergy {
 public:
  ScalarFieldEnergy(const Grid1D& grid, ScalarFieldParams params);

  const ScalarFieldParams& params() const noexcept { return params_; }
  const FiniteDifferenceLaplacian& laplacian() const noexcept { return laplacian_; }

  double energy(const Eigen::Ref<const Eigen::VectorXd>& u) const;
  Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& u) const;
  Eigen::VectorXd hessian(const Eigen::Ref<const Eigen::VectorXd>& v,
                          const Eigen::Ref<const Eigen::VectorXd>& w) const;
  /// kappa times the stencil matrix.
  Eigen::SparseMatrix<double> linear_matrix() const;
  double stiffness_bound() const;

 private:
  double density(double u, int j) const noexcept;
  double density_prime(double u, int j) const noexcept;
  double density_second(double u, int j) const noexcept;
  double potential_at(int j) const noexcept {
    return params_.potential.size() ? params_.potential[j] : 0.0;
  }

  Grid1D grid_;
  ScalarFieldParams params_;
  FiniteDifferenceLaplacian laplacian_;
};

/// Gradient flow du/dt = -E'(u) of a real scalar field.
class ScalarFieldModel final : public EnergyModel {
 public:
  ScalarFieldModel(const Grid1D& grid, ScalarFieldParams params);

  const ScalarFieldEnergy& field() const noexcept { return field_; }
  const Eigen::SparseMatrix<double>& linear_part() const override { return linear_; }
  double stiffness_bound() const override { return field_.stiffness_bound(); }

 protected:
  double energy_impl(const StateVector& u) const override;
  Eigen::VectorXd gradient_impl(const StateVector& u) const override;
  Eigen::VectorXd hessian_impl(const StateVector& v, const StateVector& w) const override;

 private:
  ScalarFieldEnergy field_;
  Eigen::SparseMatrix<double> linear_;
};

/// Hamiltonian E(u1, u2) = E~(u1) + 1/2 ||u2||^2, the first-order form of
/// the second-order dynamics d^2 v/dt^2 = -E~'(v).
class CanonicalPairModel final : public EnergyModel {
 public:
  CanonicalPairModel(const Grid1D& grid, ScalarFieldParams params);

  const ScalarFieldEnergy& field() const noexcept { return field_; }
  const Eigen::SparseMatrix<double>& linear_part() const override { return linear_; }
  double stiffness_bound() const override;

 protected:
  double energy_impl(const StateVector& u) const override;
  Eigen::VectorXd gradient_impl(const StateVector& u) const override;
  Eigen::VectorXd hessian_impl(const StateVector& v, const StateVector& w) const override;

 private:
  ScalarFieldEnergy field_;
  Eigen::SparseMatrix<double> linear_;
};

struct NlsParams {
  double chemical_potential = 1.0;  // mu in the frequency-shifted functional
  double nonlinearity = 1.0;        // g in -g/2 |psi|^4
  double epsilon = 0.0;
  Eigen::VectorXd potential;  // V at grid nodes; empty means V = 0
  int stencil_order = 6;
};

/// Focusing cubic NLS functional, shifted by mu times the mass:
///   E(psi) = int 1/2 |psi'|^2 - g/2 |psi|^4 + 1/2 (mu + eps V) |psi|^2.
/// Periodic grids only.
class NlsModel final : public EnergyModel {
 public:
  NlsModel(const Grid1D& grid, NlsParams params);

  const NlsParams& params() const noexcept { return params_; }
  const Eigen::SparseMatrix<double>& linear_part() const override { return linear_; }
  double stiffness_bound() const override { return stiffness_; }
  std::optional<Eigen::VectorXd> local_phase_rate(const StateVector& u) const override;

  /// 1/2 ||psi||^2.
  double mass(const StateVector& u) const;

 protected:
  double energy_impl(const StateVector& u) const override;
  Eigen::VectorXd gradient_impl(const StateVector& u) const override;
  Eigen::VectorXd hessian_impl(const StateVector& v, const StateVector& w) const override;

 private:
  double potential_at(int j) const noexcept {
    return params_.potential.size() ? params_.potential[j] : 0.0;
  }

  NlsParams params_;
  FiniteDifferenceLaplacian laplacian_;
  Eigen::SparseMatrix<double> linear_;
  double stiffness_;
};

}  // namespace adiabatic
