#include "adiabatic/cli/run_config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "adiabatic/errors.hpp"

namespace adiabatic::cli {

std::string_view to_string(Command c) {
  switch (c) {
    case Command::run: return "run";
    case Command::audit: return "audit";
    case Command::sweep: return "sweep";
    case Command::validate: return "validate";
  }
  return "run";
}

Command parse_command(std::string_view s) {
  for (Command c : {Command::run, Command::audit, Command::sweep, Command::validate}) {
    if (s == to_string(c)) return c;
  }
  throw ConfigError("unknown command '" + std::string(s) + "'");
}

Boundary RunConfig::effective_boundary() const {
  return boundary ? *boundary : default_boundary(model);
}

Grid1D RunConfig::grid() const { return Grid1D(length, points, effective_boundary()); }

ModelBundle RunConfig::bundle(std::optional<double> eps) const {
  const Grid1D g = grid();
  ModelBundle b = make_model(model, g, eps.value_or(epsilon), sample_potential(g, potential),
                             options);
  if (chart_box) b = with_chart_box(std::move(b), *chart_box);
  return b;
}

ExperimentConfig RunConfig::experiment() const {
  ExperimentConfig e;
  e.run_id = run_id;
  e.full = full;
  e.effective = {effective_dt, full.t_end, effective_scheme};
  e.budgets = budgets;
  e.projection.tube_radius = budgets.tube_radius;
  return e;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view s, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("expected " + std::string(what) + ", got '" + std::string(s) + "'");
  }
  return v;
}

double parse_double(std::string_view s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  return parse_number<double>(s, "a number");
}

std::vector<double> parse_list(std::string_view s) {
  std::vector<double> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(parse_double(trim(s.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

using Setter = std::function<void(RunConfig&, std::string_view)>;
using Schema = std::map<std::string, std::map<std::string, Setter>, std::less<>>;

Setter real(double RunConfig::*field) {
  return [field](RunConfig& c, std::string_view v) { c.*field = parse_double(v); };
}

Setter integer(int RunConfig::*field) {
  return [field](RunConfig& c, std::string_view v) { c.*field = parse_number<int>(v, "an integer"); };
}

Setter text(std::string RunConfig::*field) {
  return [field](RunConfig& c, std::string_view v) {
    if (v.empty()) throw ConfigError("empty value");
    c.*field = std::string(v);
  };
}

AdmissibleBox& chart_box(RunConfig& c) {
  if (!c.chart_box) c.chart_box = AdmissibleBox{};
  return *c.chart_box;
}

const Schema& schema() {
  static const Schema s = {
      {"run",
       {{"command", [](RunConfig& c, std::string_view v) { c.command = parse_command(v); }},
        {"workers", integer(&RunConfig::workers)}}},
      {"model",
       {{"name",
         [](RunConfig& c, std::string_view v) {
           for (const auto& n : model_names()) {
             if (v == n) {
               c.model = n;
               return;
             }
           }
           throw ConfigError("unknown model '" + std::string(v) + "'");
         }},
        {"epsilon", real(&RunConfig::epsilon)},
        {"length", real(&RunConfig::length)},
        {"points", integer(&RunConfig::points)},
        {"boundary", [](RunConfig& c, std::string_view v) { c.boundary = parse_boundary(v); }},
        {"potential",
         [](RunConfig& c, std::string_view v) { c.potential = parse_potential_shape(v); }},
        {"coupling",
         [](RunConfig& c, std::string_view v) { c.options.coupling = parse_coupling(v); }},
        {"stencil_order",
         [](RunConfig& c, std::string_view v) {
           c.options.stencil_order = parse_number<int>(v, "an integer");
         }},
        {"center", [](RunConfig& c, std::string_view v) { c.options.center = parse_double(v); }},
        {"momentum",
         [](RunConfig& c, std::string_view v) { c.options.momentum = parse_double(v); }}}},
      {"chart",
       {{"lower", [](RunConfig& c, std::string_view v) { chart_box(c).lower = to_vector(parse_list(v)); }},
        {"upper", [](RunConfig& c, std::string_view v) { chart_box(c).upper = to_vector(parse_list(v)); }}}},
      {"full",
       {{"scheme", [](RunConfig& c, std::string_view v) { c.full.scheme = parse_full_scheme(v); }},
        {"dt", [](RunConfig& c, std::string_view v) { c.full.dt = parse_double(v); }},
        {"t_end", [](RunConfig& c, std::string_view v) { c.full.t_end = parse_double(v); }},
        {"output_every",
         [](RunConfig& c, std::string_view v) {
           c.full.output_every = parse_number<int>(v, "an integer");
         }}}},
      {"effective",
       {{"scheme",
         [](RunConfig& c, std::string_view v) { c.effective_scheme = parse_effective_scheme(v); }},
        {"dt", real(&RunConfig::effective_dt)}}},
      {"budgets",
       {{"epsilon_budget",
         [](RunConfig& c, std::string_view v) { c.budgets.epsilon_budget = parse_double(v); }},
        {"alpha_floor",
         [](RunConfig& c, std::string_view v) { c.budgets.alpha_floor = parse_double(v); }},
        {"tube_radius",
         [](RunConfig& c, std::string_view v) { c.budgets.tube_radius = parse_double(v); }},
        {"ansatz_beta",
         [](RunConfig& c, std::string_view v) { c.budgets.ansatz_beta = parse_double(v); }}}},
      {"perturbation",
       {{"mode",
         [](RunConfig& c, std::string_view v) { c.perturbation.mode = parse_perturbation_mode(v); }},
        {"amplitude",
         [](RunConfig& c, std::string_view v) { c.perturbation.amplitude = parse_double(v); }},
        {"seed",
         [](RunConfig& c, std::string_view v) {
           c.perturbation.seed = parse_number<std::uint64_t>(v, "an unsigned 64-bit seed");
         }},
        {"offset",
         [](RunConfig& c, std::string_view v) { c.perturbation.offset = parse_double(v); }},
        {"width",
         [](RunConfig& c, std::string_view v) { c.perturbation.width = parse_double(v); }}}},
      {"diagnostics",
       {{"transient", real(&RunConfig::transient)},
        {"floor_factor", real(&RunConfig::floor_factor)},
        {"alpha", real(&RunConfig::alpha)},
        {"window_start", real(&RunConfig::window_start)},
        {"window_end", real(&RunConfig::window_end)}}},
      {"audit",
       {{"samples", integer(&RunConfig::audit_samples)},
        {"spread", real(&RunConfig::audit_spread)},
        {"dense_threshold", integer(&RunConfig::dense_threshold)}}},
      {"sweep",
       {{"epsilons",
         [](RunConfig& c, std::string_view v) { c.sweep_epsilons = parse_list(v); }}}},
      {"output", {{"dir", text(&RunConfig::out_dir)}, {"run_id", text(&RunConfig::run_id)}}},
  };
  return s;
}

}  // namespace

RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  const auto& s = schema();
  const std::map<std::string, Setter>* section = nullptr;
  std::string section_name;
  std::set<std::string> seen;
  int chart_line = 0;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view l = trim(raw);
    if (l.empty() || l.front() == '#' || l.front() == ';') continue;
    if (l.front() == '[') {
      if (l.back() != ']') throw ConfigError("malformed section header", line);
      section_name = std::string(trim(l.substr(1, l.size() - 2)));
      const auto it = s.find(section_name);
      if (it == s.end()) throw ConfigError("unknown section [" + section_name + "]", line);
      section = &it->second;
      continue;
    }
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key = value", line);
    const std::string key(trim(l.substr(0, eq)));
    const std::string_view value = trim(l.substr(eq + 1));
    if (!section) throw ConfigError("key '" + key + "' outside any section", line);
    const auto it = section->find(key);
    if (it == section->end()) {
      throw ConfigError("unknown key '" + key + "' in [" + section_name + "]", line);
    }
    if (!seen.insert(section_name + "." + key).second) {
      throw ConfigError("duplicate key '" + key + "' in [" + section_name + "]", line);
    }
    if (section_name == "chart") chart_line = line;
    try {
      it->second(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(section_name) + "." + key + ": " + e.what(), line);
    }
  }
  if (cfg.chart_box && (cfg.chart_box->lower.size() == 0 || cfg.chart_box->upper.size() == 0)) {
    throw ConfigError("chart bounds need both lower and upper", chart_line);
  }
  return cfg;
}

RunConfig parse_run_config_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_run_config(in);
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open config file '" + path + "'");
  return parse_run_config(in);
}

void validate_run_config(const RunConfig& cfg) {
  if (cfg.workers < 0) throw ConfigError("workers must be >= 0");
  if (!(cfg.budgets.tube_radius > 0.0)) throw ConfigError("tube_radius must be positive");
  if (!(cfg.perturbation.amplitude >= 0.0)) throw ConfigError("amplitude must be >= 0");
  if (cfg.perturbation.mode != PerturbationMode::none &&
      !(cfg.perturbation.amplitude < cfg.budgets.tube_radius)) {
    throw ConfigError("perturbation amplitude must be below the tube radius");
  }
  if (cfg.perturbation.mode == PerturbationMode::random_orthogonal && !cfg.perturbation.seed) {
    throw ConfigError("random-orthogonal perturbation needs a seed");
  }
  if (!(cfg.effective_dt > 0.0)) throw ConfigError("effective dt must be positive");
  if (cfg.audit_samples < 1) throw ConfigError("audit samples must be >= 1");
  if (cfg.command == Command::sweep) {
    if (cfg.sweep_epsilons.size() < 3) throw ConfigError("at least 3 epsilon values required");
    for (double e : cfg.sweep_epsilons) {
      if (!(e > 0.0)) throw ConfigError("sweep epsilons must be positive");
    }
  }
  if (cfg.out_dir.empty()) throw ConfigError("output dir must not be empty");
  const ModelBundle b = cfg.bundle();
  if (!scheme_compatible(cfg.full.scheme, b.model->kind())) {
    throw ConfigError("scheme " + std::string(to_string(cfg.full.scheme)) +
                      " is incompatible with " + std::string(to_string(b.model->kind())) +
                      " models");
  }
  validate_config(cfg.full, *b.model);
}

void write_run_config(std::ostream& os, const RunConfig& c) {
  auto num = [](double v) { return format_double(v); };
  auto list = [&](const Eigen::VectorXd& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? ", " : "") + num(v[i]);
    return out;
  };
  os << "[run]\ncommand = " << to_string(c.command) << "\nworkers = " << c.workers << "\n\n";
  os << "[model]\nname = " << c.model << "\nepsilon = " << num(c.epsilon)
     << "\nlength = " << num(c.length) << "\npoints = " << c.points
     << "\nboundary = " << to_string(c.effective_boundary())
     << "\npotential = " << to_string(c.potential)
     << "\ncoupling = " << to_string(c.options.coupling)
     << "\nstencil_order = " << c.options.stencil_order
     << "\ncenter = " << num(c.options.center) << "\nmomentum = " << num(c.options.momentum)
     << "\n\n";
  if (c.chart_box) {
    os << "[chart]\nlower = " << list(c.chart_box->lower) << "\nupper = "
       << list(c.chart_box->upper) << "\n\n";
  }
  os << "[full]\nscheme = " << to_string(c.full.scheme) << "\ndt = " << num(c.full.dt)
     << "\nt_end = " << num(c.full.t_end) << "\noutput_every = " << c.full.output_every
     << "\n\n";
  os << "[effective]\nscheme = " << to_string(c.effective_scheme)
     << "\ndt = " << num(c.effective_dt) << "\n\n";
  os << "[budgets]\nepsilon_budget = " << num(c.budgets.epsilon_budget)
     << "\nalpha_floor = " << num(c.budgets.alpha_floor)
     << "\ntube_radius = " << num(c.budgets.tube_radius)
     << "\nansatz_beta = " << num(c.budgets.ansatz_beta) << "\n\n";
  os << "[perturbation]\nmode = " << to_string(c.perturbation.mode)
     << "\namplitude = " << num(c.perturbation.amplitude) << "\n";
  if (c.perturbation.seed) os << "seed = " << *c.perturbation.seed << "\n";
  os << "offset = " << num(c.perturbation.offset) << "\nwidth = " << num(c.perturbation.width)
     << "\n\n";
  os << "[diagnostics]\ntransient = " << num(c.transient)
     << "\nfloor_factor = " << num(c.floor_factor) << "\nalpha = " << num(c.alpha)
     << "\nwindow_start = " << num(c.window_start) << "\nwindow_end = " << num(c.window_end)
     << "\n\n";
  os << "[audit]\nsamples = " << c.audit_samples << "\nspread = " << num(c.audit_spread)
     << "\ndense_threshold = " << c.dense_threshold << "\n\n";
  if (!c.sweep_epsilons.empty()) {
    os << "[sweep]\nepsilons = " << list(to_vector(c.sweep_epsilons)) << "\n\n";
  }
  os << "[output]\ndir = " << c.out_dir << "\nrun_id = " << c.run_id << "\n";
}

std::string run_config_string(const RunConfig& cfg) {
  std::ostringstream os;
  write_run_config(os, cfg);
  return os.str();
}

}  // namespace adiabatic::cli
