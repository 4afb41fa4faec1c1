#pragma once

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "adiabatic/energy_model.hpp"

namespace adiabatic {

/// Coordinates of a point on the moduli space, tagged with the owning chart.
struct ModuliVector {
  Eigen::VectorXd coords;
  std::string chart_id;

  int dimension() const noexcept { return static_cast<int>(coords.size()); }
  double operator[](int i) const { return coords[i]; }
};

/// Per-coordinate bounds defining the admissible part of the moduli space.
struct AdmissibleBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  bool contains(const Eigen::VectorXd& x) const;
  static AdmissibleBox unbounded(int dimension);
};

/// Immersion f of the moduli space into the configuration space.
///
/// Subclasses provide eval_impl and, where a closed form exists, an analytic
/// tangent basis. Otherwise the basis is built from central differences in
/// the moduli with step kTangentStep.
class Chart {
 public:
  static constexpr double kTangentStep = 1e-6;

  Chart(std::string id, int dimension, AdmissibleBox box);
  virtual ~Chart() = default;

  const std::string& id() const noexcept { return id_; }
  int dimension() const noexcept { return dimension_; }
  const AdmissibleBox& box() const noexcept { return box_; }

  /// Builds a ModuliVector owned by this chart; throws on wrong size or NaN.
  ModuliVector point(const Eigen::VectorXd& coords) const;

  StateVector eval(const ModuliVector& sigma) const;
  std::vector<StateVector> tangent_basis(const ModuliVector& sigma) const;
  std::vector<StateVector> finite_difference_tangent(const ModuliVector& sigma,
                                                     double step = kTangentStep) const;

  void check(const ModuliVector& sigma) const;
  /// check() plus ChartBoundaryError when sigma lies outside the box.
  void check_admissible(const ModuliVector& sigma) const;

 protected:
  virtual StateVector eval_impl(const Eigen::VectorXd& coords) const = 0;
  virtual std::optional<std::vector<StateVector>> analytic_tangent(
      const Eigen::VectorXd& /*coords*/) const {
    return std::nullopt;
  }

 private:
  std::string id_;
  int dimension_;
  AdmissibleBox box_;
};

/// Chart defined by callables; mostly for tests and toy problems.
class FunctionChart final : public Chart {
 public:
  using EvalFn = std::function<StateVector(const Eigen::VectorXd&)>;
  using TangentFn = std::function<std::vector<StateVector>(const Eigen::VectorXd&)>;

  FunctionChart(std::string id, int dimension, AdmissibleBox box, EvalFn eval,
                TangentFn tangent = {});

 protected:
  StateVector eval_impl(const Eigen::VectorXd& coords) const override { return eval_(coords); }
  std::optional<std::vector<StateVector>> analytic_tangent(
      const Eigen::VectorXd& coords) const override;

 private:
  EvalFn eval_;
  TangentFn tangent_;
};

/// Matrix of the reduced operator g* J^{-1} g in the tangent basis.
struct ReducedOperator {
  Eigen::MatrixXd matrix;
  ModuliVector sigma;
};

/// Geometry of the chart at one point: f(sigma), the tangent basis g, the
/// Gram matrix and the reduced operator. Immutable once built.
class ChartFrame {
 public:
  /// Throws ChartDegeneracyError when the tangent basis or the reduced
  /// operator is numerically singular.
  ChartFrame(const Chart& chart, const EnergyModel& model, const ModuliVector& sigma);

  const ModuliVector& sigma() const noexcept { return reduced_.sigma; }
  const StateVector& point() const noexcept { return point_; }
  const std::vector<StateVector>& tangents() const noexcept { return tangents_; }
  const Eigen::MatrixXd& gram() const noexcept { return gram_; }
  const ReducedOperator& reduced() const noexcept { return reduced_; }
  int dimension() const noexcept { return static_cast<int>(tangents_.size()); }

  /// Entries <g_i, J^{-1} phi>, i.e. g* J^{-1} phi.
  Eigen::VectorXd pair_with_j_inverse(const StateVector& phi) const;
  /// Entries <g_i, phi>, i.e. g* phi.
  Eigen::VectorXd pair(const StateVector& phi) const;
  /// g xi.
  StateVector combine(const Eigen::VectorXd& xi) const;
  /// Solves (g* J^{-1} g) xi = rhs.
  Eigen::VectorXd solve_reduced(const Eigen::VectorXd& rhs) const;

 private:
  const EnergyModel* model_;
  StateVector point_;
  std::vector<StateVector> tangents_;
  std::vector<StateVector> j_inverse_tangents_;  // (J^{-1})^T g_i, so <g_i, J^{-1} phi> = <., phi>
  Eigen::MatrixXd gram_;
  ReducedOperator reduced_;
  Eigen::FullPivLU<Eigen::MatrixXd> lu_;
};

Eigen::MatrixXd gram_matrix(const std::vector<StateVector>& basis);

ReducedOperator assemble_reduced_operator(const Chart& chart, const EnergyModel& model,
                                          const ModuliVector& sigma);

/// Q phi = g (g* J^{-1} g)^{-1} g* J^{-1} phi.
StateVector projector_apply(const Chart& chart, const EnergyModel& model,
                            const ModuliVector& sigma, const StateVector& phi);

struct ProjectionOptions {
  double relative_tolerance = 1e-10;  // on ||F|| / ||u||
  int max_iterations = 50;
  double tube_radius = std::numeric_limits<double>::infinity();
  double jacobian_step = 1e-6;
};

struct Projection {
  ModuliVector sigma;
  int iterations = 0;
  double residual = 0.0;  // ||g* J^{-1} (u - f(sigma))||
  double distance = 0.0;  // ||u - f(sigma)||
};

/// F(u, sigma) = g_sigma* J^{-1} (u - f(sigma)).
Eigen::VectorXd moduli_residual(const Chart& chart, const EnergyModel& model,
                                const StateVector& u, const ModuliVector& sigma);

/// Solves F(u, sigma) = 0 by damped Newton from `guess`.
///
/// Errors: DegenerateProjectionError on a singular Jacobian, TubeExitError on
/// non-convergence or when ||u - f(sigma)|| exceeds the tube radius,
/// ChartBoundaryError when the iterate is pushed outside the admissible box.
Projection project_to_moduli(const Chart& chart, const EnergyModel& model, const StateVector& u,
                             const ModuliVector& guess, const ProjectionOptions& options = {});

/// E(f(sigma)).
double pullback_energy(const Chart& chart, const EnergyModel& model, const ModuliVector& sigma);

/// g_sigma* E'(f(sigma)), the gradient of the pullback energy.
Eigen::VectorXd pullback_gradient(const Chart& chart, const EnergyModel& model,
                                  const ModuliVector& sigma);
Eigen::VectorXd pullback_gradient(const ChartFrame& frame, const EnergyModel& model);

/// Solution xi of (g* J^{-1} g) xi = pullback_gradient.
Eigen::VectorXd effective_velocity(const Chart& chart, const EnergyModel& model,
                                   const ModuliVector& sigma);
Eigen::VectorXd effective_velocity(const ChartFrame& frame, const EnergyModel& model);

/// ||sigma_dot - effective_velocity(sigma)|| in the Euclidean norm.
double effective_velocity_residual(const Chart& chart, const EnergyModel& model,
                                   const ModuliVector& sigma, const Eigen::VectorXd& sigma_dot);

}  // namespace adiabatic
