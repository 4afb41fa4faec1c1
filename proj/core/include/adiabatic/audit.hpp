#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "adiabatic/chart.hpp"
#include "adiabatic/models.hpp"
#include "adiabatic/regression.hpp"

namespace adiabatic {

struct AuditBudgets {
  double epsilon_budget = 0.25;
  double alpha_floor = 1.0;
};

/// max over samples of ||E'(f(sigma))||.
double audit_c1(const Chart& chart, const EnergyModel& model,
                std::span<const ModuliVector> samples);

struct GapOptions {
  int dense_threshold = 1024;  // storage dimension; above this use preconditioned iteration
  double tolerance = 1e-9;     // residual norm relative to max(1, |lambda|)
  int max_iterations = 2000;
};

struct GapResult {
  double value = 0.0;
  Eigen::VectorXd eigenvector;     // storage coordinates, unit Euclidean norm
  double deflation_residual = 0.0;  // ||P x - x|| / ||x||
  int iterations = 0;               // 0 for the dense path
  bool dense = true;
};

/// Smallest eigenvalue of L_sigma on the L2-orthogonal complement of J g.
///
/// Dense symmetric eigensolve of P L P + c (I - P) up to dense_threshold
/// unknowns; beyond that a single-vector LOBPCG on range(P), preconditioned by
/// (A + I)^{-1} with A the model's linear part. Throws AuditError when the
/// iteration does not converge.
GapResult audit_c2_gap_detail(const Chart& chart, const EnergyModel& model,
                              const ModuliVector& sigma, const GapOptions& options = {});
double audit_c2_gap(const Chart& chart, const EnergyModel& model, const ModuliVector& sigma,
                    const GapOptions& options = {});

/// Spectral radius of the quadratic form of L_sigma on span(J g).
double audit_c3_tangent(const Chart& chart, const EnergyModel& model, const ModuliVector& sigma);

/// Operator norm of g_sigma: sqrt of the largest Gram eigenvalue.
double tangent_operator_norm(const Chart& chart, const ModuliVector& sigma);

/// L2-orthonormal basis of span(J g_i) (modified Gram-Schmidt, two passes).
std::vector<StateVector> orthonormal_j_tangents(const Chart& chart, const EnergyModel& model,
                                                const ModuliVector& sigma);

/// Dense matrix of L_v in storage coordinates, built column by column.
Eigen::MatrixXd dense_hessian(const EnergyModel& model, const StateVector& v);

struct AuditReport {
  std::string chart_id;
  double epsilon_c1 = 0.0;
  double alpha_c2 = 0.0;
  double c3_bound = 0.0;
  double g_norm = 0.0;
  double deflation_residual = 0.0;
  std::vector<ModuliVector> sampled_sigmas;
  AuditBudgets budgets;

  bool c1_pass() const noexcept { return epsilon_c1 <= budgets.epsilon_budget; }
  bool c2_pass() const noexcept { return alpha_c2 >= budgets.alpha_floor; }
  bool c3_pass() const noexcept { return c3_bound <= budgets.epsilon_budget; }
  bool all_pass() const noexcept { return c1_pass() && c2_pass() && c3_pass(); }

  /// Flat key=value lines, values with 17 significant digits.
  std::string to_key_value() const;
};

/// C1 over all samples; C2, C3 and g_norm take the worst sample.
AuditReport run_audit(const Chart& chart, const EnergyModel& model,
                      std::span<const ModuliVector> samples, const AuditBudgets& budgets,
                      const GapOptions& gap = {}, int workers = 1);

/// Evenly spaced samples of the first coordinate around `centre`, other
/// coordinates fixed; clipped to the admissible box.
std::vector<ModuliVector> sample_moduli(const Chart& chart, const ModuliVector& centre, int count,
                                        double spread);

struct ScalingSample {
  double epsilon = 0.0;
  double g_norm = 0.0;
  double reduced_norm = 0.0;          // ||J_sigma|| (spectral)
  double reduced_inverse_norm = 0.0;  // ||J_sigma^{-1}||
  double pullback_gradient_norm = 0.0;
};

struct ScalingReport {
  std::vector<ScalingSample> samples;
  LogLogFit g_norm, reduced_norm, reduced_inverse_norm, pullback_gradient_norm;

  std::string to_key_value() const;
};

/// Evaluates the scaling quantities at each member's initial sigma and fits
/// log-log slopes against epsilon. Needs at least 3 positive epsilons.
ScalingReport audit_scaling(const ModelFamily& family, std::span<const double> epsilons,
                            int workers = 1);

}  // namespace adiabatic
