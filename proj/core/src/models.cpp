#include "adiabatic/models.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "adiabatic/errors.hpp"

namespace adiabatic {

std::string_view to_string(PotentialShape s) {
  return s == PotentialShape::none ? "none" : "cosine";
}

PotentialShape parse_potential_shape(std::string_view s) {
  if (s == "none") return PotentialShape::none;
  if (s == "cosine" || s == "cos") return PotentialShape::cosine;
  throw ConfigError("unknown potential '" + std::string(s) + "'");
}

Eigen::VectorXd sample_potential(const Grid1D& grid, PotentialShape shape) {
  if (shape == PotentialShape::none) return {};
  Eigen::VectorXd v(grid.num_points());
  for (int i = 0; i < grid.num_points(); ++i) {
    v[i] = std::cos(2.0 * std::numbers::pi * grid.x(i) / grid.length());
  }
  return v;
}

namespace {

double sech(double x) { return 1.0 / std::cosh(x); }

void check_placement(const Grid1D& grid, double center) {
  if (!(std::abs(center) <= 0.25 * grid.length())) {
    throw PlacementError("soliton centre " + std::to_string(center) +
                         " is within L/4 of the boundary");
  }
}

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("epsilon must be finite and nonnegative");
  }
}

AdmissibleBox box(std::initializer_list<double> lo, std::initializer_list<double> hi) {
  AdmissibleBox b;
  b.lower = Eigen::Map<const Eigen::VectorXd>(lo.begin(), static_cast<Eigen::Index>(lo.size()));
  b.upper = Eigen::Map<const Eigen::VectorXd>(hi.begin(), static_cast<Eigen::Index>(hi.size()));
  return b;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.begin(), static_cast<Eigen::Index>(v.size()));
}

// Kink profile of width `width`: tanh((x - a)/width) and its a-derivative.
std::shared_ptr<const Chart> kink_chart(const Grid1D& grid, const std::string& id, double width) {
  const double quarter = 0.25 * grid.length();
  auto eval = [grid, width](const Eigen::VectorXd& s) {
    StateVector u(grid, ValueKind::real);
    for (int i = 0; i < grid.num_points(); ++i) u[i] = std::tanh(grid.offset(i, s[0]) / width);
    return u;
  };
  auto tangent = [grid, width](const Eigen::VectorXd& s) {
    StateVector g(grid, ValueKind::real);
    for (int i = 0; i < grid.num_points(); ++i) {
      const double c = sech(grid.offset(i, s[0]) / width);
      g[i] = -c * c / width;
    }
    return std::vector<StateVector>{std::move(g)};
  };
  return std::make_shared<FunctionChart>(id, 1, box({-quarter}, {quarter}), eval, tangent);
}

Eigen::VectorXd gaussian(const Grid1D& grid) {
  Eigen::VectorXd phi(grid.num_points());
  for (int i = 0; i < grid.num_points(); ++i) phi[i] = std::exp(-0.5 * grid.x(i) * grid.x(i));
  return phi;
}

}  // namespace

ModelBundle make_allen_cahn_kink(const Grid1D& grid, double epsilon, Eigen::VectorXd potential,
                                 const ModelOptions& options) {
  check_epsilon(epsilon);
  if (grid.periodic()) throw ConfigError("the kink model needs a Dirichlet grid");
  check_placement(grid, options.center);

  ScalarFieldParams p;
  p.well = Well::double_well;
  p.left_value = -1.0;
  p.right_value = 1.0;
  p.epsilon = epsilon;
  p.potential = potential;
  p.coupling = options.coupling;
  p.stencil_order = options.stencil_order;
  auto model = std::make_shared<ScalarFieldModel>(grid, p);
  auto chart = kink_chart(grid, "kink", kSqrt2);
  ModuliVector start = chart->point(vec({options.center}));
  return {ModelSpec{"allen-cahn-kink", ModelKind::dissipative, epsilon, std::move(potential), grid},
          std::move(model), std::move(chart), std::move(start)};
}

ModelBundle make_nls_soliton(const Grid1D& grid, double epsilon, Eigen::VectorXd potential,
                             const ModelOptions& options) {
  check_epsilon(epsilon);
  if (!grid.periodic()) throw ConfigError("the NLS model needs a periodic grid");
  check_placement(grid, options.center);

  NlsParams p;
  p.epsilon = epsilon;
  p.potential = potential;
  p.stencil_order = options.stencil_order;
  auto model = std::make_shared<NlsModel>(grid, p);

  // sigma = (a, p, gamma, eta)
  auto eval = [grid](const Eigen::VectorXd& s) {
    StateVector u(grid, ValueKind::complex);
    for (int i = 0; i < grid.num_points(); ++i) {
      const double y = grid.offset(i, s[0]);
      const double amp = s[3] * sech(s[3] * y);
      u.set_complex(i, std::polar(amp, s[1] * y + s[2]));
    }
    return u;
  };
  auto tangent = [grid](const Eigen::VectorXd& s) {
    const double mom = s[1], eta = s[3];
    std::vector<StateVector> g(4, StateVector(grid, ValueKind::complex));
    const std::complex<double> I(0.0, 1.0);
    for (int i = 0; i < grid.num_points(); ++i) {
      const double y = grid.offset(i, s[0]);
      const double sh = sech(eta * y), th = std::tanh(eta * y);
      const std::complex<double> phase = std::polar(1.0, mom * y + s[2]);
      g[0].set_complex(i, (eta * eta * sh * th - I * mom * eta * sh) * phase);
      g[1].set_complex(i, I * y * eta * sh * phase);
      g[2].set_complex(i, I * eta * sh * phase);
      g[3].set_complex(i, (sh - eta * y * sh * th) * phase);
    }
    return g;
  };
  auto chart = std::make_shared<FunctionChart>(
      "nls-soliton", 4, box({-grid.length(), -1.0, -1e3, 0.5}, {grid.length(), 1.0, 1e3, 2.0}),
      eval, tangent);
  ModuliVector start = chart->point(vec({options.center, options.momentum, 0.0, 1.0}));
  return {ModelSpec{"nls-soliton", ModelKind::schroedinger, epsilon, std::move(potential), grid},
          std::move(model), std::move(chart), std::move(start)};
}

ModelBundle make_wave_kink(const Grid1D& grid, double epsilon, Eigen::VectorXd potential,
                           const ModelOptions& options) {
  check_epsilon(epsilon);
  if (grid.periodic()) throw ConfigError("the wave-kink model needs a Dirichlet grid");
  check_placement(grid, options.center);

  ScalarFieldParams p;
  p.well = Well::double_well;
  p.left_value = -1.0;
  p.right_value = 1.0;
  p.epsilon = epsilon;
  p.potential = potential;
  p.coupling = options.coupling;
  p.stencil_order = options.stencil_order;
  auto model = std::make_shared<CanonicalPairModel>(grid, p);

  const int n = grid.num_points();
  auto eval = [grid, n](const Eigen::VectorXd& s) {
    StateVector u(grid, ValueKind::pair);
    for (int i = 0; i < n; ++i) {
      const double z = grid.offset(i, s[0]) / kSqrt2;
      const double c = sech(z);
      u[i] = std::tanh(z);
      u[n + i] = -s[1] * c * c / kSqrt2;
    }
    return u;
  };
  auto tangent = [grid, n](const Eigen::VectorXd& s) {
    std::vector<StateVector> g(2, StateVector(grid, ValueKind::pair));
    for (int i = 0; i < n; ++i) {
      const double z = grid.offset(i, s[0]) / kSqrt2;
      const double c = sech(z);
      const double k1 = c * c / kSqrt2;           // K'
      const double k2 = -c * c * std::tanh(z);     // K''
      g[0][i] = -k1;
      g[0][n + i] = s[1] * k2;
      g[1][n + i] = -k1;
    }
    return g;
  };
  const double quarter = 0.25 * grid.length();
  auto chart = std::make_shared<FunctionChart>("wave-kink", 2,
                                               box({-quarter, -0.9}, {quarter, 0.9}), eval, tangent);
  ModuliVector start = chart->point(vec({options.center, options.momentum}));
  return {ModelSpec{"wave-kink", ModelKind::canonical_pair, epsilon, std::move(potential), grid},
          std::move(model), std::move(chart), std::move(start)};
}

ModelBundle make_quadratic_toy(const Grid1D& grid) {
  ScalarFieldParams p;
  p.gradient_coefficient = 0.0;
  p.well = Well::harmonic;
  auto model = std::make_shared<ScalarFieldModel>(grid, p);
  const Eigen::VectorXd phi = gaussian(grid);
  auto eval = [grid, phi](const Eigen::VectorXd& s) {
    return StateVector(grid, ValueKind::real, s[0] * phi);
  };
  auto tangent = [grid, phi](const Eigen::VectorXd&) {
    return std::vector<StateVector>{StateVector(grid, ValueKind::real, phi)};
  };
  auto chart = std::make_shared<FunctionChart>("quadratic-toy", 1, box({-10.0}, {10.0}), eval,
                                               tangent);
  ModuliVector start = chart->point(vec({0.0}));
  return {ModelSpec{"quadratic-toy", ModelKind::dissipative, 0.0, {}, grid}, std::move(model),
          std::move(chart), std::move(start)};
}

ModelBundle make_linear_wave(const Grid1D& grid) {
  ScalarFieldParams p;
  p.well = Well::harmonic;
  auto model = std::make_shared<CanonicalPairModel>(grid, p);
  const int n = grid.num_points();
  const Eigen::VectorXd phi = gaussian(grid);
  auto eval = [grid, phi, n](const Eigen::VectorXd& s) {
    StateVector u(grid, ValueKind::pair);
    u.first() = s[0] * phi;
    u.second() = s[1] * phi;
    return u;
  };
  auto tangent = [grid, phi](const Eigen::VectorXd&) {
    std::vector<StateVector> g(2, StateVector(grid, ValueKind::pair));
    g[0].first() = phi;
    g[1].second() = phi;
    return g;
  };
  auto chart = std::make_shared<FunctionChart>("linear-wave", 2,
                                               box({-10.0, -10.0}, {10.0, 10.0}), eval, tangent);
  ModuliVector start = chart->point(vec({0.0, 0.0}));
  return {ModelSpec{"linear-wave", ModelKind::canonical_pair, 0.0, {}, grid}, std::move(model),
          std::move(chart), std::move(start)};
}

ModelBundle make_vacuum(const Grid1D& grid) {
  if (!grid.periodic()) throw ConfigError("the vacuum model needs a periodic grid");
  ScalarFieldParams p;
  p.well = Well::double_well;
  auto model = std::make_shared<ScalarFieldModel>(grid, p);
  auto eval = [grid](const Eigen::VectorXd& s) {
    return StateVector(grid, ValueKind::real,
                       Eigen::VectorXd::Constant(grid.num_points(), 1.0 + s[0]));
  };
  auto tangent = [grid](const Eigen::VectorXd&) {
    return std::vector<StateVector>{
        StateVector(grid, ValueKind::real, Eigen::VectorXd::Ones(grid.num_points()))};
  };
  auto chart = std::make_shared<FunctionChart>("vacuum", 1, box({-0.5}, {0.5}), eval, tangent);
  ModuliVector start = chart->point(vec({0.0}));
  return {ModelSpec{"vacuum", ModelKind::dissipative, 0.0, {}, grid}, std::move(model),
          std::move(chart), std::move(start)};
}

ModelBundle make_rescaled_kink(const Grid1D& grid, double epsilon, const ModelOptions& options) {
  if (!(epsilon > 0.0)) throw ConfigError("the rescaled kink needs epsilon > 0");
  if (grid.periodic()) throw ConfigError("the rescaled kink needs a Dirichlet grid");
  check_placement(grid, options.center);
  ScalarFieldParams p;
  p.well = Well::double_well;
  p.well_scale = 1.0 / (epsilon * epsilon);
  p.left_value = -1.0;
  p.right_value = 1.0;
  p.stencil_order = options.stencil_order;
  auto model = std::make_shared<ScalarFieldModel>(grid, p);
  auto chart = kink_chart(grid, "rescaled-kink", kSqrt2 * epsilon);
  ModuliVector start = chart->point(vec({options.center}));
  return {ModelSpec{"rescaled-kink", ModelKind::dissipative, epsilon, {}, grid}, std::move(model),
          std::move(chart), std::move(start)};
}

ModelBundle with_chart_box(ModelBundle bundle, AdmissibleBox new_box) {
  const int dim = bundle.chart->dimension();
  if (new_box.lower.size() != dim || new_box.upper.size() != dim) {
    throw ConfigError("chart bounds need " + std::to_string(dim) + " entries");
  }
  if (!(new_box.lower.array() < new_box.upper.array()).all()) {
    throw ConfigError("chart lower bounds must be below the upper bounds");
  }
  if (!new_box.contains(bundle.initial.coords)) {
    throw ConfigError("initial moduli point lies outside the chart bounds");
  }
  std::shared_ptr<const Chart> inner = bundle.chart;
  auto eval = [inner](const Eigen::VectorXd& s) { return inner->eval(inner->point(s)); };
  auto tangent = [inner](const Eigen::VectorXd& s) {
    return inner->tangent_basis(inner->point(s));
  };
  bundle.chart =
      std::make_shared<FunctionChart>(inner->id(), dim, std::move(new_box), eval, tangent);
  bundle.initial = bundle.chart->point(bundle.initial.coords);
  return bundle;
}

const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names = {"allen-cahn-kink", "nls-soliton",  "wave-kink",
                                                 "quadratic-toy",   "linear-wave", "vacuum",
                                                 "rescaled-kink"};
  return names;
}

ModelBundle make_model(std::string_view name, const Grid1D& grid, double epsilon,
                       Eigen::VectorXd potential, const ModelOptions& options) {
  if (name == "allen-cahn-kink") return make_allen_cahn_kink(grid, epsilon, std::move(potential), options);
  if (name == "nls-soliton") return make_nls_soliton(grid, epsilon, std::move(potential), options);
  if (name == "wave-kink") return make_wave_kink(grid, epsilon, std::move(potential), options);
  if (name == "quadratic-toy") return make_quadratic_toy(grid);
  if (name == "linear-wave") return make_linear_wave(grid);
  if (name == "vacuum") return make_vacuum(grid);
  if (name == "rescaled-kink") return make_rescaled_kink(grid, epsilon, options);
  throw ConfigError("unknown model '" + std::string(name) + "'");
}

Boundary default_boundary(std::string_view name) {
  return (name == "nls-soliton" || name == "vacuum") ? Boundary::periodic : Boundary::dirichlet;
}

}  // namespace adiabatic
