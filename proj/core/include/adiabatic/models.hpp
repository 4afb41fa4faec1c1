#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "adiabatic/chart.hpp"
#include "adiabatic/field_models.hpp"

namespace adiabatic {

enum class PotentialShape { none, cosine };

std::string_view to_string(PotentialShape s);
PotentialShape parse_potential_shape(std::string_view s);

/// V sampled on the grid. `cosine` is cos(2 pi x / L); `none` is empty.
Eigen::VectorXd sample_potential(const Grid1D& grid, PotentialShape shape);

struct ModelSpec {
  std::string name;
  ModelKind kind;
  double epsilon = 0.0;
  Eigen::VectorXd potential;
  Grid1D grid;
};

/// Model plus chart plus a default starting point on the moduli space.
/// Shared pointers so bundles can be handed to several workers.
struct ModelBundle {
  ModelSpec spec;
  std::shared_ptr<const EnergyModel> model;
  std::shared_ptr<const Chart> chart;
  ModuliVector initial;
};

struct ModelOptions {
  Coupling coupling = Coupling::well_depth;
  int stencil_order = 6;
  double center = 0.0;
  double momentum = 0.0;
};

inline constexpr double kSqrt2 = 1.4142135623730951;

/// Allen-Cahn energy with the kink chart f(a) = tanh((x - a)/sqrt 2).
/// Needs a Dirichlet grid; |center| must not exceed L/4.
ModelBundle make_allen_cahn_kink(const Grid1D& grid, double epsilon, Eigen::VectorXd potential,
                                 const ModelOptions& options = {});

/// Focusing NLS with the four-parameter soliton chart
///   f(a, p, gamma, eta) = eta sech(eta (x - a)) exp(i (p (x - a) + gamma)).
ModelBundle make_nls_soliton(const Grid1D& grid, double epsilon, Eigen::VectorXd potential,
                             const ModelOptions& options = {});

/// Canonical pair over the Allen-Cahn energy, chart
///   f(a, p) = (K(x - a), -p K'(x - a)),  K(x) = tanh(x / sqrt 2).
ModelBundle make_wave_kink(const Grid1D& grid, double epsilon, Eigen::VectorXd potential,
                           const ModelOptions& options = {});

/// E = 1/2 ||u||^2 (so L = I) with the line chart f(a) = a phi, phi a Gaussian.
ModelBundle make_quadratic_toy(const Grid1D& grid);

/// Canonical pair E = int 1/2 |v'|^2 + 1/2 v^2 + 1/2 p^2, chart f(a, b) = (a phi, b phi).
ModelBundle make_linear_wave(const Grid1D& grid);

/// Double well on a periodic grid with the constant chart f(a) = 1 + a.
ModelBundle make_vacuum(const Grid1D& grid);

/// Allen-Cahn with well scale 1/eps^2, chart f(a) = tanh((x - a)/(sqrt 2 eps)).
ModelBundle make_rescaled_kink(const Grid1D& grid, double epsilon,
                               const ModelOptions& options = {});

/// The bundle with its chart restricted to (or widened to) `box`.
/// Throws ConfigError on a dimension mismatch or an initial point outside the box.
ModelBundle with_chart_box(ModelBundle bundle, AdmissibleBox box);

/// Model family indexed by epsilon (for sweeps and scaling audits).
using ModelFamily = std::function<ModelBundle(double epsilon)>;

/// Names accepted by make_model.
const std::vector<std::string>& model_names();

ModelBundle make_model(std::string_view name, const Grid1D& grid, double epsilon,
                       Eigen::VectorXd potential, const ModelOptions& options = {});

/// Default boundary for each model name (periodic for NLS and the vacuum).
Boundary default_boundary(std::string_view name);

}  // namespace adiabatic
