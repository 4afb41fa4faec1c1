#include "adiabatic/audit.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "adiabatic/errors.hpp"
#include "adiabatic/parallel.hpp"

namespace adiabatic {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Euclidean-orthonormal columns spanning J g (storage coordinates).
Eigen::MatrixXd deflation_basis(const std::vector<StateVector>& q) {
  const double scale = std::sqrt(q.front().grid().spacing());
  Eigen::MatrixXd out(q.front().size(), static_cast<Eigen::Index>(q.size()));
  for (size_t i = 0; i < q.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = scale * q[i].values();
  return out;
}

Eigen::VectorXd project_off(const Eigen::MatrixXd& qhat, const Eigen::VectorXd& x) {
  return x - qhat * (qhat.transpose() * x);
}

GapResult dense_gap(const EnergyModel& model, const StateVector& v, const Eigen::MatrixXd& qhat) {
  Eigen::MatrixXd m = dense_hessian(model, v);
  m = 0.5 * (m + m.transpose()).eval();
  const double c = m.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  // P M P + c (I - P) with P = I - qhat qhat^T.
  Eigen::MatrixXd mp = m - (m * qhat) * qhat.transpose();
  Eigen::MatrixXd b = mp - qhat * (qhat.transpose() * mp);
  b += c * qhat * qhat.transpose();
  b = 0.5 * (b + b.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
  if (eig.info() != Eigen::Success) throw AuditError("dense eigensolver failed to converge");
  GapResult out;
  out.value = eig.eigenvalues()[0];
  out.eigenvector = eig.eigenvectors().col(0);
  out.deflation_residual = (project_off(qhat, out.eigenvector) - out.eigenvector).norm();
  out.dense = true;
  return out;
}

// Single-vector LOBPCG for the smallest eigenvalue of P L P on range(P).
GapResult iterative_gap(const EnergyModel& model, const StateVector& v,
                        const Eigen::MatrixXd& qhat, const GapOptions& options) {
  const Eigen::Index n = v.size();
  Eigen::SparseMatrix<double> shifted = model.linear_part();
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += 1.0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> precond(shifted);
  if (precond.info() != Eigen::Success) throw AuditError("preconditioner factorization failed");

  auto apply = [&](const Eigen::VectorXd& x) {
    StateVector s(v.grid(), v.kind(), project_off(qhat, x));
    return project_off(qhat, model.hessian_apply(v, s).values());
  };

  std::mt19937_64 rng(20240917);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = normal(rng);
  x = project_off(qhat, x);
  x.normalize();
  Eigen::VectorXd bx = apply(x);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  double lambda = x.dot(bx);

  for (int it = 1; it <= options.max_iterations; ++it) {
    const Eigen::VectorXd r = bx - lambda * x;
    if (r.norm() <= options.tolerance * std::max(1.0, std::abs(lambda))) {
      GapResult out;
      out.value = lambda;
      out.eigenvector = x;
      out.deflation_residual = (project_off(qhat, x) - x).norm();
      out.iterations = it;
      out.dense = false;
      return out;
    }
    Eigen::VectorXd w = project_off(qhat, precond.solve(r));

    // Orthonormal basis of span{x, w, p}.
    std::vector<Eigen::VectorXd> basis{x};
    for (const Eigen::VectorXd* cand : {&w, &p}) {
      Eigen::VectorXd c = *cand;
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) c -= b.dot(c) * b;
      }
      const double nc = c.norm();
      if (nc > 1e-12 * std::max(1.0, cand->norm())) basis.push_back(c / nc);
    }
    const int k = static_cast<int>(basis.size());
    std::vector<Eigen::VectorXd> images(k);
    images[0] = bx;
    for (int i = 1; i < k; ++i) images[i] = apply(basis[i]);
    Eigen::MatrixXd g(k, k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) g(i, j) = basis[i].dot(images[j]);
    }
    g = 0.5 * (g + g.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(g);
    const Eigen::VectorXd y = small.eigenvectors().col(0);

    Eigen::VectorXd xn = Eigen::VectorXd::Zero(n), bxn = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd pn = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < k; ++i) {
      xn += y[i] * basis[i];
      bxn += y[i] * images[i];
      if (i > 0) pn += y[i] * basis[i];
    }
    const double nx = xn.norm();
    x = xn / nx;
    bx = bxn / nx;
    p = pn;
    lambda = x.dot(bx);
  }
  throw AuditError("C2 eigen-iteration did not converge after " +
                   std::to_string(options.max_iterations) + " iterations");
}

}  // namespace

Eigen::MatrixXd dense_hessian(const EnergyModel& model, const StateVector& v) {
  const Eigen::Index n = v.size();
  Eigen::MatrixXd m(n, n);
  StateVector e = v.zeros_like();
  for (Eigen::Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    m.col(j) = model.hessian_apply(v, e).values();
    e[j] = 0.0;
  }
  return m;
}

std::vector<StateVector> orthonormal_j_tangents(const Chart& chart, const EnergyModel& model,
                                                const ModuliVector& sigma) {
  std::vector<StateVector> q;
  for (const StateVector& g : chart.tangent_basis(sigma)) {
    StateVector t = apply_J(model, g);
    for (int pass = 0; pass < 2; ++pass) {
      for (const StateVector& b : q) t -= inner_product(b, t) * b;
    }
    const double nt = norm(t);
    if (!(nt > 1e-12 * norm(g))) {
      throw ChartDegeneracyError("J-rotated tangent vectors are linearly dependent");
    }
    t *= 1.0 / nt;
    q.push_back(std::move(t));
  }
  return q;
}

double audit_c1(const Chart& chart, const EnergyModel& model,
                std::span<const ModuliVector> samples) {
  double worst = 0.0;
  for (const ModuliVector& s : samples) {
    chart.check_admissible(s);
    worst = std::max(worst, norm(model.gradient(chart.eval(s))));
  }
  return worst;
}

GapResult audit_c2_gap_detail(const Chart& chart, const EnergyModel& model,
                              const ModuliVector& sigma, const GapOptions& options) {
  chart.check_admissible(sigma);
  const StateVector v = chart.eval(sigma);
  const Eigen::MatrixXd qhat = deflation_basis(orthonormal_j_tangents(chart, model, sigma));
  if (v.size() <= options.dense_threshold) return dense_gap(model, v, qhat);
  return iterative_gap(model, v, qhat, options);
}

double audit_c2_gap(const Chart& chart, const EnergyModel& model, const ModuliVector& sigma,
                    const GapOptions& options) {
  return audit_c2_gap_detail(chart, model, sigma, options).value;
}

double audit_c3_tangent(const Chart& chart, const EnergyModel& model, const ModuliVector& sigma) {
  chart.check_admissible(sigma);
  const StateVector v = chart.eval(sigma);
  const std::vector<StateVector> q = orthonormal_j_tangents(chart, model, sigma);
  const int k = static_cast<int>(q.size());
  Eigen::MatrixXd s(k, k);
  for (int i = 0; i < k; ++i) {
    const StateVector lq = model.hessian_apply(v, q[i]);
    for (int j = 0; j < k; ++j) s(i, j) = inner_product(lq, q[j]);
  }
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

double tangent_operator_norm(const Chart& chart, const ModuliVector& sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram_matrix(chart.tangent_basis(sigma)),
                                                     Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

std::vector<ModuliVector> sample_moduli(const Chart& chart, const ModuliVector& centre, int count,
                                        double spread) {
  chart.check(centre);
  if (count < 1) throw ConfigError("need at least one moduli sample");
  std::vector<ModuliVector> out;
  for (int i = 0; i < count; ++i) {
    ModuliVector s = centre;
    if (count > 1) s.coords[0] += spread * (2.0 * i / (count - 1) - 1.0);
    s.coords[0] = std::clamp(s.coords[0], chart.box().lower[0], chart.box().upper[0]);
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

struct SampleAudit {
  double c1, c2, c3, g, deflation;
};

}  // namespace

AuditReport run_audit(const Chart& chart, const EnergyModel& model,
                      std::span<const ModuliVector> samples, const AuditBudgets& budgets,
                      const GapOptions& gap, int workers) {
  if (samples.empty()) throw AuditError("audit needs at least one moduli sample");
  for (const auto& s : samples) chart.check_admissible(s);
  const std::vector<SampleAudit> per = parallel_map<SampleAudit>(
      static_cast<int>(samples.size()), workers, [&](int i) {
        const ModuliVector& s = samples[i];
        const GapResult g2 = audit_c2_gap_detail(chart, model, s, gap);
        return SampleAudit{norm(model.gradient(chart.eval(s))), g2.value,
                           audit_c3_tangent(chart, model, s), tangent_operator_norm(chart, s),
                           g2.deflation_residual};
      });
  AuditReport r;
  r.chart_id = chart.id();
  r.budgets = budgets;
  r.sampled_sigmas.assign(samples.begin(), samples.end());
  r.alpha_c2 = std::numeric_limits<double>::infinity();
  for (const SampleAudit& a : per) {
    r.epsilon_c1 = std::max(r.epsilon_c1, a.c1);
    r.alpha_c2 = std::min(r.alpha_c2, a.c2);
    r.c3_bound = std::max(r.c3_bound, a.c3);
    r.g_norm = std::max(r.g_norm, a.g);
    r.deflation_residual = std::max(r.deflation_residual, a.deflation);
  }
  return r;
}

std::string AuditReport::to_key_value() const {
  std::ostringstream os;
  os << "chart=" << chart_id << '\n'
     << "epsilon_c1=" << fmt(epsilon_c1) << '\n'
     << "alpha_c2=" << fmt(alpha_c2) << '\n'
     << "c3_bound=" << fmt(c3_bound) << '\n'
     << "g_norm=" << fmt(g_norm) << '\n'
     << "deflation_residual=" << fmt(deflation_residual) << '\n'
     << "epsilon_budget=" << fmt(budgets.epsilon_budget) << '\n'
     << "alpha_floor=" << fmt(budgets.alpha_floor) << '\n'
     << "c1_pass=" << (c1_pass() ? 1 : 0) << '\n'
     << "c2_pass=" << (c2_pass() ? 1 : 0) << '\n'
     << "c3_pass=" << (c3_pass() ? 1 : 0) << '\n'
     << "samples=" << sampled_sigmas.size() << '\n';
  for (size_t i = 0; i < sampled_sigmas.size(); ++i) {
    os << "sample_" << i << '=';
    for (int j = 0; j < sampled_sigmas[i].dimension(); ++j) {
      os << (j ? "," : "") << fmt(sampled_sigmas[i][j]);
    }
    os << '\n';
  }
  return os.str();
}

ScalingReport audit_scaling(const ModelFamily& family, std::span<const double> epsilons,
                            int workers) {
  if (epsilons.size() < 3) throw AuditError("scaling audit needs at least 3 epsilon values");
  for (double e : epsilons) {
    if (!(e > 0.0)) throw AuditError("scaling audit needs positive epsilon values");
  }
  ScalingReport rep;
  rep.samples = parallel_map<ScalingSample>(static_cast<int>(epsilons.size()), workers, [&](int i) {
    const ModelBundle b = family(epsilons[i]);
    const ChartFrame frame(*b.chart, *b.model, b.initial);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(frame.reduced().matrix);
    const auto& sv = svd.singularValues();
    ScalingSample s;
    s.epsilon = epsilons[i];
    s.g_norm = tangent_operator_norm(*b.chart, b.initial);
    s.reduced_norm = sv[0];
    s.reduced_inverse_norm = 1.0 / sv[sv.size() - 1];
    s.pullback_gradient_norm = pullback_gradient(frame, *b.model).norm();
    return s;
  });
  std::vector<double> e, g, j, ji, pg;
  for (const auto& s : rep.samples) {
    e.push_back(s.epsilon);
    g.push_back(s.g_norm);
    j.push_back(s.reduced_norm);
    ji.push_back(s.reduced_inverse_norm);
    pg.push_back(s.pullback_gradient_norm);
  }
  rep.g_norm = fit_log_log(e, g);
  rep.reduced_norm = fit_log_log(e, j);
  rep.reduced_inverse_norm = fit_log_log(e, ji);
  rep.pullback_gradient_norm = fit_log_log(e, pg);
  return rep;
}

std::string ScalingReport::to_key_value() const {
  std::ostringstream os;
  auto line = [&](const char* name, const LogLogFit& f) {
    os << name << "_slope=" << f.describe() << '\n'
       << name << "_r2=" << fmt(f.r_squared()) << '\n';
  };
  line("g_norm", g_norm);
  line("reduced_norm", reduced_norm);
  line("reduced_inverse_norm", reduced_inverse_norm);
  line("pullback_gradient_norm", pullback_gradient_norm);
  for (size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    os << "sample_" << i << '=' << fmt(s.epsilon) << ',' << fmt(s.g_norm) << ','
       << fmt(s.reduced_norm) << ',' << fmt(s.reduced_inverse_norm) << ','
       << fmt(s.pullback_gradient_norm) << '\n';
  }
  return os.str();
}

}  // namespace adiabatic
