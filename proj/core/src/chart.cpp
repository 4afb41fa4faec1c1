#include "adiabatic/chart.hpp"

#include <algorithm>
#include <cmath>

#include "adiabatic/errors.hpp"

namespace adiabatic {

bool AdmissibleBox::contains(const Eigen::VectorXd& x) const {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  }
  return true;
}

AdmissibleBox AdmissibleBox::unbounded(int dimension) {
  const double inf = std::numeric_limits<double>::infinity();
  return {Eigen::VectorXd::Constant(dimension, -inf), Eigen::VectorXd::Constant(dimension, inf)};
}

// ---------------------------------------------------------------------------
// Chart

Chart::Chart(std::string id, int dimension, AdmissibleBox box)
    : id_(std::move(id)), dimension_(dimension), box_(std::move(box)) {
  if (dimension < 1) throw StructuralError("chart dimension must be at least 1");
  if (box_.lower.size() != dimension || box_.upper.size() != dimension) {
    throw StructuralError("admissible box dimension does not match chart");
  }
}

ModuliVector Chart::point(const Eigen::VectorXd& coords) const {
  ModuliVector s{coords, id_};
  check(s);
  return s;
}

void Chart::check(const ModuliVector& sigma) const {
  if (sigma.chart_id != id_) {
    throw StructuralError("moduli vector belongs to chart '" + sigma.chart_id + "', not '" + id_ +
                          "'");
  }
  if (sigma.dimension() != dimension_) {
    throw StructuralError("moduli vector has dimension " + std::to_string(sigma.dimension()) +
                          ", chart has " + std::to_string(dimension_));
  }
  if (!sigma.coords.allFinite()) throw NumericError("non-finite moduli coordinate", -1);
}

void Chart::check_admissible(const ModuliVector& sigma) const {
  check(sigma);
  if (!box_.contains(sigma.coords)) {
    throw ChartBoundaryError("moduli outside the admissible box of chart '" + id_ + "'");
  }
}

StateVector Chart::eval(const ModuliVector& sigma) const {
  check(sigma);
  return eval_impl(sigma.coords);
}

std::vector<StateVector> Chart::tangent_basis(const ModuliVector& sigma) const {
  check(sigma);
  if (auto t = analytic_tangent(sigma.coords)) return std::move(*t);
  return finite_difference_tangent(sigma);
}

std::vector<StateVector> Chart::finite_difference_tangent(const ModuliVector& sigma,
                                                          double step) const {
  check(sigma);
  std::vector<StateVector> out;
  out.reserve(dimension_);
  for (int i = 0; i < dimension_; ++i) {
    Eigen::VectorXd plus = sigma.coords, minus = sigma.coords;
    plus[i] += step;
    minus[i] -= step;
    StateVector d = eval_impl(plus);
    d -= eval_impl(minus);
    d *= 1.0 / (2.0 * step);
    out.push_back(std::move(d));
  }
  return out;
}

FunctionChart::FunctionChart(std::string id, int dimension, AdmissibleBox box, EvalFn eval,
                             TangentFn tangent)
    : Chart(std::move(id), dimension, std::move(box)),
      eval_(std::move(eval)),
      tangent_(std::move(tangent)) {}

std::optional<std::vector<StateVector>> FunctionChart::analytic_tangent(
    const Eigen::VectorXd& coords) const {
  if (!tangent_) return std::nullopt;
  return tangent_(coords);
}

// ---------------------------------------------------------------------------
// ChartFrame

Eigen::MatrixXd gram_matrix(const std::vector<StateVector>& basis) {
  const int k = static_cast<int>(basis.size());
  Eigen::MatrixXd g(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) g(i, j) = g(j, i) = inner_product(basis[i], basis[j]);
  }
  return g;
}

ChartFrame::ChartFrame(const Chart& chart, const EnergyModel& model, const ModuliVector& sigma)
    : model_(&model), point_(chart.eval(sigma)), tangents_(chart.tangent_basis(sigma)) {
  model.check_state(point_);
  const int k = static_cast<int>(tangents_.size());
  j_inverse_tangents_.reserve(k);
  // <g, J^{-1} phi> = <J g, phi> because (J^{-1})^T = J for every supported J.
  for (const StateVector& g : tangents_) j_inverse_tangents_.push_back(apply_J(model, g));

  gram_ = gram_matrix(tangents_);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram_, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 1e-12 * hi) || !(hi > 0.0)) {
    throw ChartDegeneracyError("tangent basis is linearly dependent (Gram eigenvalues " +
                               std::to_string(lo) + ", " + std::to_string(hi) + ")");
  }

  Eigen::MatrixXd m(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) m(i, j) = inner_product(j_inverse_tangents_[i], tangents_[j]);
  }
  reduced_ = ReducedOperator{m, sigma};
  lu_.compute(m);
  const double scale = std::pow(m.norm(), k);
  if (!lu_.isInvertible() || !(std::abs(lu_.determinant()) > 1e-14 * scale)) {
    throw ChartDegeneracyError("reduced operator is singular");
  }
}

Eigen::VectorXd ChartFrame::pair_with_j_inverse(const StateVector& phi) const {
  Eigen::VectorXd out(dimension());
  for (int i = 0; i < dimension(); ++i) out[i] = inner_product(j_inverse_tangents_[i], phi);
  return out;
}

Eigen::VectorXd ChartFrame::pair(const StateVector& phi) const {
  Eigen::VectorXd out(dimension());
  for (int i = 0; i < dimension(); ++i) out[i] = inner_product(tangents_[i], phi);
  return out;
}

StateVector ChartFrame::combine(const Eigen::VectorXd& xi) const {
  StateVector out = point_.zeros_like();
  for (int i = 0; i < dimension(); ++i) out.values() += xi[i] * tangents_[i].values();
  return out;
}

Eigen::VectorXd ChartFrame::solve_reduced(const Eigen::VectorXd& rhs) const {
  return lu_.solve(rhs);
}

// ---------------------------------------------------------------------------
// Operations

ReducedOperator assemble_reduced_operator(const Chart& chart, const EnergyModel& model,
                                          const ModuliVector& sigma) {
  chart.check_admissible(sigma);
  return ChartFrame(chart, model, sigma).reduced();
}

StateVector projector_apply(const Chart& chart, const EnergyModel& model,
                            const ModuliVector& sigma, const StateVector& phi) {
  chart.check_admissible(sigma);
  const ChartFrame frame(chart, model, sigma);
  return frame.combine(frame.solve_reduced(frame.pair_with_j_inverse(phi)));
}

Eigen::VectorXd moduli_residual(const Chart& chart, const EnergyModel& model,
                                const StateVector& u, const ModuliVector& sigma) {
  const StateVector f = chart.eval(sigma);
  const std::vector<StateVector> g = chart.tangent_basis(sigma);
  const StateVector jinv = apply_J_inverse(model, u - f);
  Eigen::VectorXd r(chart.dimension());
  for (int i = 0; i < chart.dimension(); ++i) r[i] = inner_product(g[i], jinv);
  return r;
}

Projection project_to_moduli(const Chart& chart, const EnergyModel& model, const StateVector& u,
                             const ModuliVector& guess, const ProjectionOptions& options) {
  chart.check_admissible(guess);
  model.check_state(u);
  const int k = chart.dimension();
  const double tol = options.relative_tolerance * std::max(norm(u), 1e-300);

  ModuliVector sigma = guess;
  Eigen::VectorXd f_val = moduli_residual(chart, model, u, sigma);
  int iterations = 0;
  while (f_val.norm() > tol) {
    if (iterations >= options.max_iterations) {
      throw TubeExitError("moduli projection did not converge in " +
                          std::to_string(options.max_iterations) + " iterations (|F| = " +
                          std::to_string(f_val.norm()) + ")");
    }
    Eigen::MatrixXd jac(k, k);
    for (int j = 0; j < k; ++j) {
      ModuliVector plus = sigma, minus = sigma;
      plus.coords[j] += options.jacobian_step;
      minus.coords[j] -= options.jacobian_step;
      jac.col(j) = (moduli_residual(chart, model, u, plus) -
                    moduli_residual(chart, model, u, minus)) /
                   (2.0 * options.jacobian_step);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (!(sv[k - 1] > 1e-12 * sv[0])) {
      throw DegenerateProjectionError("Newton Jacobian of the moduli equation is singular");
    }
    const Eigen::VectorXd step = -svd.solve(f_val);

    double lambda = 1.0;
    bool accepted = false;
    bool hit_boundary = false;
    for (int halving = 0; halving < 30; ++halving, lambda *= 0.5) {
      ModuliVector trial = sigma;
      trial.coords += lambda * step;
      if (!chart.box().contains(trial.coords)) {
        hit_boundary = true;
        continue;
      }
      Eigen::VectorXd f_trial = moduli_residual(chart, model, u, trial);
      if (f_trial.allFinite() && f_trial.norm() < f_val.norm()) {
        sigma = std::move(trial);
        f_val = std::move(f_trial);
        accepted = true;
        break;
      }
    }
    ++iterations;
    if (!accepted) {
      if (hit_boundary) {
        throw ChartBoundaryError("moduli projection left the admissible box of chart '" +
                                 chart.id() + "'");
      }
      if (f_val.norm() <= 1e3 * tol) break;  // stagnated at roundoff level
      throw TubeExitError("moduli projection stalled (|F| = " + std::to_string(f_val.norm()) + ")");
    }
  }

  Projection out{sigma, iterations, f_val.norm(), norm(u - chart.eval(sigma))};
  if (out.distance > options.tube_radius) {
    throw TubeExitError("distance to the soliton manifold " + std::to_string(out.distance) +
                        " exceeds tube radius " + std::to_string(options.tube_radius));
  }
  return out;
}

double pullback_energy(const Chart& chart, const EnergyModel& model, const ModuliVector& sigma) {
  return model.energy(chart.eval(sigma));
}

Eigen::VectorXd pullback_gradient(const ChartFrame& frame, const EnergyModel& model) {
  return frame.pair(model.gradient(frame.point()));
}

Eigen::VectorXd pullback_gradient(const Chart& chart, const EnergyModel& model,
                                  const ModuliVector& sigma) {
  chart.check_admissible(sigma);
  const StateVector f = chart.eval(sigma);
  const StateVector grad = model.gradient(f);
  const std::vector<StateVector> g = chart.tangent_basis(sigma);
  Eigen::VectorXd out(chart.dimension());
  for (int i = 0; i < chart.dimension(); ++i) out[i] = inner_product(g[i], grad);
  return out;
}

Eigen::VectorXd effective_velocity(const ChartFrame& frame, const EnergyModel& model) {
  return frame.solve_reduced(pullback_gradient(frame, model));
}

Eigen::VectorXd effective_velocity(const Chart& chart, const EnergyModel& model,
                                   const ModuliVector& sigma) {
  chart.check_admissible(sigma);
  return effective_velocity(ChartFrame(chart, model, sigma), model);
}

double effective_velocity_residual(const Chart& chart, const EnergyModel& model,
                                   const ModuliVector& sigma, const Eigen::VectorXd& sigma_dot) {
  return (sigma_dot - effective_velocity(chart, model, sigma)).norm();
}

}  // namespace adiabatic
