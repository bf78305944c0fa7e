#include "kasnerlab/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <type_traits>

#include "kasnerlab/vtd.hpp"

namespace kasnerlab {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

using Section = std::map<std::string, Entry>;
using Document = std::map<std::string, Section>;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"run", {"command"}},
      {"exponents", {"family", "dim", "eps", "root", "values", "theta"}},
      {"grid", {"active", "points", "scheme", "dealias"}},
      {"perturbation", {"field", "component", "mode", "amplitude"}},
      {"integrator",
       {"dtau", "t_start", "t_end", "method", "cmc_drift_ceiling", "residual_ceiling", "kretschmann_every",
        "track_inverse", "project_trace"}},
      {"lapse", {"tol", "max_iterations", "dense_limit"}},
      {"norms", {"sigma", "gamma", "A", "N"}},
      {"output", {"directory", "diagnostics", "summary", "final_snapshot", "slice_every"}},
      {"kretschmann", {"t_list"}},
      {"geodesic", {"t_start", "t_min", "position", "velocity", "sigma", "random_starts", "seed", "run"}},
      {"vtd", {"shape", "eps0", "eps_amplitude", "theta0", "theta_amplitude", "t_list"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

class Reader {
 public:
  Reader(Document doc, std::vector<ConfigIssue>& issues) : doc_(std::move(doc)), issues_(issues) {}

  bool has_section(const std::string& section) const { return doc_.count(section) > 0; }

  const Entry* find(const std::string& section, const std::string& key) {
    auto s = doc_.find(section);
    if (s == doc_.end()) return nullptr;
    auto e = s->second.find(key);
    if (e == s->second.end()) return nullptr;
    e->second.used = true;
    return &e->second;
  }

  void issue(const std::string& path, const std::string& message) { issues_.push_back({path, message}); }

  std::optional<std::string> text(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (e == nullptr) return std::nullopt;
    return e->value;
  }

  template <typename T>
  void number(const std::string& section, const std::string& key, T& out) {
    const Entry* e = find(section, key);
    if (e == nullptr) return;
    try {
      std::size_t pos = 0;
      double v = std::stod(e->value, &pos);
      if (trim(e->value.substr(pos)) != "") throw std::invalid_argument("trailing");
      if constexpr (std::is_integral_v<T>) {
        if (v != std::floor(v)) throw std::invalid_argument("not an integer");
        out = static_cast<T>(v);
      } else {
        out = v;
      }
    } catch (const std::exception&) {
      issue(section + "." + key, "expected a number, got '" + e->value + "'");
    }
  }

  void boolean(const std::string& section, const std::string& key, bool& out) {
    const Entry* e = find(section, key);
    if (e == nullptr) return;
    if (e->value == "true" || e->value == "1" || e->value == "yes")
      out = true;
    else if (e->value == "false" || e->value == "0" || e->value == "no")
      out = false;
    else
      issue(section + "." + key, "expected true or false, got '" + e->value + "'");
  }

  template <typename T>
  bool list(const std::string& section, const std::string& key, std::vector<T>& out) {
    const Entry* e = find(section, key);
    if (e == nullptr) return false;
    std::vector<T> v;
    std::stringstream in(e->value);
    std::string item;
    try {
      while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) throw std::invalid_argument("empty");
        std::size_t pos = 0;
        const double x = std::stod(item, &pos);
        if (pos != item.size()) throw std::invalid_argument("trailing");
        if constexpr (std::is_integral_v<T>) {
          if (x != std::floor(x)) throw std::invalid_argument("not an integer");
        }
        v.push_back(static_cast<T>(x));
      }
    } catch (const std::exception&) {
      issue(section + "." + key, "expected a comma-separated list of numbers, got '" + e->value + "'");
      return false;
    }
    out = std::move(v);
    return true;
  }

 private:
  Document doc_;
  std::vector<ConfigIssue>& issues_;
};

Document parse_document(const std::string& text, std::vector<ConfigIssue>& issues) {
  Document doc;
  std::stringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') {
        issues.push_back({where, "malformed section header"});
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!schema().count(section)) issues.push_back({section, "unknown section"});
      doc[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back({where, "expected key = value"});
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      issues.push_back({key, "key outside of any section"});
      continue;
    }
    const std::string path = section + "." + key;
    if (schema().count(section) && !schema().at(section).count(key)) {
      issues.push_back({path, "unknown key"});
      continue;
    }
    auto& sec = doc[section];
    if (sec.count(key)) {
      issues.push_back({path, "duplicate key (line " + std::to_string(lineno) + ")"});
      continue;
    }
    sec[key] = Entry{value, lineno, false};
  }
  return doc;
}

RunConfig parse_into(const std::string& text, std::vector<ConfigIssue>& issues) {
  RunConfig cfg;
  Reader r(parse_document(text, issues), issues);

  const auto command = r.text("run", "command");
  if (!command) {
    r.issue("run.command", "missing (one of exponents, simulate, kretschmann, geodesic, vtd-check)");
  } else if (*command == "exponents") {
    cfg.command = Command::exponents;
  } else if (*command == "simulate") {
    cfg.command = Command::simulate;
  } else if (*command == "kretschmann") {
    cfg.command = Command::kretschmann;
  } else if (*command == "geodesic") {
    cfg.command = Command::geodesic;
  } else if (*command == "vtd-check") {
    cfg.command = Command::vtd_check;
  } else {
    r.issue("run.command", "unknown command '" + *command + "'");
  }

  // exponents
  auto& ex = cfg.exponents;
  if (auto fam = r.text("exponents", "family")) {
    if (*fam == "construct")
      ex.family = ExponentSpec::Family::construct;
    else if (*fam == "borderline36")
      ex.family = ExponentSpec::Family::borderline36;
    else if (*fam == "explicit")
      ex.family = ExponentSpec::Family::explicit_list;
    else if (*fam == "kasner_circle")
      ex.family = ExponentSpec::Family::kasner_circle;
    else
      r.issue("exponents.family", "unknown family '" + *fam + "'");
  }
  r.number("exponents", "dim", ex.dim);
  r.number("exponents", "eps", ex.eps);
  r.number("exponents", "theta", ex.theta);
  if (auto root = r.text("exponents", "root")) {
    if (*root == "plus")
      ex.root = QuadraticRoot::plus;
    else if (*root == "minus")
      ex.root = QuadraticRoot::minus;
    else
      r.issue("exponents.root", "expected plus or minus");
  }
  r.list("exponents", "values", ex.values);
  std::optional<KasnerExponents> q;
  try {
    q = ex.build();
  } catch (const DomainError& e) {
    const std::string path = ex.family == ExponentSpec::Family::construct ? "exponents.dim" : "exponents";
    const bool dim_problem = ex.family == ExponentSpec::Family::construct && ex.dim < 38;
    r.issue(dim_problem ? path : "exponents", e.what());
  }
  const int dim = q ? q->dim() : ex.dim;

  // grid
  auto& grid = cfg.grid;
  grid.dim = dim;
  std::vector<int> active{1};
  r.list("grid", "active", active);
  std::vector<int> points{16};
  r.list("grid", "points", points);
  if (points.size() == 1 && active.size() > 1) points.assign(active.size(), points.front());
  grid.active.clear();
  for (int a : active) grid.active.push_back(a - 1);
  grid.points = points;
  if (auto scheme = r.text("grid", "scheme")) {
    try {
      grid.scheme = parse_scheme(*scheme);
    } catch (const ConfigError& e) {
      r.issue("grid.scheme", e.what());
    }
  }
  r.boolean("grid", "dealias", grid.dealias);
  bool grid_ok = true;
  try {
    grid.validate();
  } catch (const ConfigError& e) {
    grid_ok = false;
    r.issue("grid", e.what());
  }

  // perturbation
  auto& pert = cfg.perturbation;
  if (auto field = r.text("perturbation", "field")) {
    if (*field == "none")
      pert.target = PerturbationSpec::Target::none;
    else if (*field == "g")
      pert.target = PerturbationSpec::Target::g;
    else if (*field == "kappa")
      pert.target = PerturbationSpec::Target::kappa;
    else if (*field == "n")
      pert.target = PerturbationSpec::Target::n;
    else
      r.issue("perturbation.field", "expected none, g, kappa or n");
  }
  std::vector<int> comp{1, 1};
  if (r.list("perturbation", "component", comp) && comp.size() != 2)
    r.issue("perturbation.component", "expected two indices");
  if (comp.size() == 2) {
    pert.i = comp[0] - 1;
    pert.j = comp[1] - 1;
    if (pert.i < 0 || pert.i >= dim || pert.j < 0 || pert.j >= dim)
      r.issue("perturbation.component", "indices must lie in 1.." + std::to_string(dim));
  }
  pert.mode.assign(grid.active.size(), 0);
  if (!pert.mode.empty()) pert.mode[0] = 1;
  if (r.list("perturbation", "mode", pert.mode) && pert.mode.size() != grid.active.size())
    r.issue("perturbation.mode", "expected one wave number per active direction");
  r.number("perturbation", "amplitude", pert.amplitude);
  if (!std::isfinite(pert.amplitude)) r.issue("perturbation.amplitude", "must be finite");

  // integrator
  auto& in = cfg.integrator;
  r.number("integrator", "dtau", in.dtau);
  r.number("integrator", "t_start", in.t_start);
  r.number("integrator", "t_end", in.t_end);
  if (auto m = r.text("integrator", "method"); m && *m != "rk4") r.issue("integrator.method", "only rk4 is supported");
  r.number("integrator", "cmc_drift_ceiling", in.cmc_drift_ceiling);
  r.number("integrator", "residual_ceiling", in.residual_ceiling);
  r.number("integrator", "kretschmann_every", in.kretschmann_every);
  r.boolean("integrator", "track_inverse", in.track_inverse);
  r.boolean("integrator", "project_trace", in.evolution.project_trace);
  if (!(in.dtau > 0.0)) r.issue("integrator.dtau", "must be positive");
  if (!(in.t_start > 0.0)) r.issue("integrator.t_start", "must be positive");
  if (!(in.t_end > 0.0)) r.issue("integrator.t_end", "must be positive");
  if (in.t_start > 0.0 && in.t_end > 0.0 && !(in.t_end < in.t_start))
    r.issue("integrator.t_end", "integrator.t_end must be smaller than integrator.t_start");
  if (!(in.cmc_drift_ceiling >= 0.0)) r.issue("integrator.cmc_drift_ceiling", "must be >= 0");
  if (!(in.residual_ceiling >= 0.0)) r.issue("integrator.residual_ceiling", "must be >= 0");
  if (in.kretschmann_every < 0) r.issue("integrator.kretschmann_every", "must be >= 0");

  // lapse
  auto& lp = in.evolution.lapse;
  r.number("lapse", "tol", lp.tol);
  r.number("lapse", "max_iterations", lp.max_iterations);
  r.number("lapse", "dense_limit", lp.dense_limit);
  if (!(lp.tol > 0.0)) r.issue("lapse.tol", "must be positive");
  if (lp.max_iterations < 1) r.issue("lapse.max_iterations", "must be >= 1");
  if (lp.dense_limit < 0) r.issue("lapse.dense_limit", "must be >= 0");

  // norms
  if (r.has_section("norms")) {
    NormParams p;
    r.number("norms", "sigma", p.sigma);
    r.number("norms", "gamma", p.gamma);
    r.number("norms", "A", p.A);
    r.number("norms", "N", p.N_num);
    if (q) {
      try {
        p.validate(*q);
      } catch (const ConfigError& e) {
        r.issue("norms", e.what());
      }
    }
    cfg.norms = p;
  }

  // output
  auto& out = cfg.output;
  if (auto v = r.text("output", "directory")) out.directory = *v;
  if (auto v = r.text("output", "diagnostics")) out.diagnostics = *v;
  if (auto v = r.text("output", "summary")) out.summary = *v;
  r.boolean("output", "final_snapshot", out.final_snapshot);
  r.number("output", "slice_every", out.slice_every);
  if (out.slice_every < 0) r.issue("output.slice_every", "must be >= 0");

  // kretschmann
  if (r.list("kretschmann", "t_list", cfg.kretschmann.t_list)) {
    if (cfg.kretschmann.t_list.empty()) r.issue("kretschmann.t_list", "must not be empty");
    for (double t : cfg.kretschmann.t_list)
      if (!(t > 0.0)) r.issue("kretschmann.t_list", "times must be positive");
  }

  // geodesic
  auto& geo = cfg.geodesic;
  r.number("geodesic", "t_start", geo.t_start);
  r.number("geodesic", "t_min", geo.t_min);
  r.list("geodesic", "position", geo.position);
  r.list("geodesic", "velocity", geo.velocity);
  r.number("geodesic", "sigma", geo.sigma);
  r.number("geodesic", "random_starts", geo.random_starts);
  r.number("geodesic", "seed", geo.seed);
  if (auto v = r.text("geodesic", "run")) geo.run_index = *v;
  if (!(geo.t_min > 0.0 && geo.t_min < geo.t_start)) r.issue("geodesic.t_min", "must satisfy 0 < t_min < t_start");
  if (!(geo.sigma > 0.0 && geo.sigma < 1.0 / 6.0)) r.issue("geodesic.sigma", "must lie in (0, 1/6)");
  if (!geo.position.empty() && static_cast<int>(geo.position.size()) != dim)
    r.issue("geodesic.position", "expected " + std::to_string(dim) + " coordinates");
  if (!geo.velocity.empty() && static_cast<int>(geo.velocity.size()) != dim + 1)
    r.issue("geodesic.velocity", "expected " + std::to_string(dim + 1) + " components (dt/dA first)");
  if (geo.random_starts < 0) r.issue("geodesic.random_starts", "must be >= 0");

  // vtd
  auto& vt = cfg.vtd;
  if (auto shape = r.text("vtd", "shape")) {
    if (*shape == "constant")
      vt.shape = VtdSpec::Shape::constant;
    else if (*shape == "eps_sine")
      vt.shape = VtdSpec::Shape::eps_sine;
    else if (*shape == "circle_sine")
      vt.shape = VtdSpec::Shape::circle_sine;
    else
      r.issue("vtd.shape", "expected constant, eps_sine or circle_sine");
  }
  r.number("vtd", "eps0", vt.eps0);
  r.number("vtd", "eps_amplitude", vt.eps_amplitude);
  r.number("vtd", "theta0", vt.theta0);
  r.number("vtd", "theta_amplitude", vt.theta_amplitude);
  r.list("vtd", "t_list", vt.t_list);
  if (cfg.command == Command::vtd_check) {
    if (vt.t_list.size() < 3) r.issue("vtd.t_list", "needs at least three times");
    for (std::size_t i = 0; i < vt.t_list.size(); ++i)
      if (!(vt.t_list[i] > 0.0) || (i > 0 && !(vt.t_list[i] < vt.t_list[i - 1])))
        r.issue("vtd.t_list", "times must be positive and strictly decreasing");
    if (vt.shape == VtdSpec::Shape::circle_sine && dim != 3)
      r.issue("vtd.shape", "circle_sine needs exponents.dim = 3");
    if (vt.shape == VtdSpec::Shape::eps_sine && dim < 38) r.issue("vtd.shape", "eps_sine needs exponents.dim >= 38");
    if (vt.shape == VtdSpec::Shape::eps_sine && grid_ok) {
      for (double s : {-1.0, 1.0}) {
        try {
          construct_exponents(dim, vt.eps0 * (1.0 + s * vt.eps_amplitude), ex.root);
        } catch (const DomainError& e) {
          r.issue("vtd.eps0", e.what());
          break;
        }
      }
    }
  }
  return cfg;
}

}  // namespace

ConfigValidationError::ConfigValidationError(std::vector<ConfigIssue> issues)
    : ConfigError([&] {
        std::string msg = "invalid configuration:";
        for (const auto& i : issues) msg += "\n  " + i.path + ": " + i.message;
        return msg;
      }()),
      issues_(std::move(issues)) {}

std::string to_string(Command c) {
  switch (c) {
    case Command::exponents: return "exponents";
    case Command::simulate: return "simulate";
    case Command::kretschmann: return "kretschmann";
    case Command::geodesic: return "geodesic";
    case Command::vtd_check: return "vtd-check";
  }
  return "unknown";
}

KasnerExponents ExponentSpec::build() const {
  switch (family) {
    case Family::construct: return construct_exponents(dim, eps, root);
    case Family::borderline36: return borderline_exponents_36();
    case Family::explicit_list: return KasnerExponents(values);
    case Family::kasner_circle: return kasner_circle(theta);
  }
  throw DomainError("unknown exponent family");
}

void PerturbationSpec::apply(SolutionState& s) const {
  if (target == Target::none || amplitude == 0.0) return;
  const GridSpec& grid = s.g.grid();
  for (int p = 0; p < grid.num_points(); ++p) {
    double phase = 0.0;
    for (int a = 0; a < grid.num_active(); ++a)
      phase += mode[static_cast<std::size_t>(a)] * grid.coordinate(p, a);
    const double v = amplitude * std::sin(2.0 * std::numbers::pi * phase);
    switch (target) {
      case Target::g:
        s.g.matrix(p)(i, j) += v;
        if (i != j) s.g.matrix(p)(j, i) += v;
        break;
      case Target::kappa: {
        // Symmetric in the lowered form: delta K_ij = delta K_ji = v sqrt(g_ii g_jj) / t.
        Eigen::MatrixXd lowered = Eigen::MatrixXd::Zero(grid.dim, grid.dim);
        const double w = v * std::sqrt(s.g.matrix(p)(i, i) * s.g.matrix(p)(j, j)) / s.t;
        lowered(i, j) = w;
        lowered(j, i) = w;
        s.K.matrix(p) += s.ginv.matrix(p) * lowered;
        break;
      }
      case Target::n: s.n(p, 0) += v; break;
      case Target::none: break;
    }
  }
  if (target == Target::g) s.ginv = invert_metric(s.g);
}

RunConfig parse_config(const std::string& text) {
  std::vector<ConfigIssue> issues;
  RunConfig cfg = parse_into(text, issues);
  if (!issues.empty()) throw ConfigValidationError(std::move(issues));
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::vector<ConfigIssue> check_config(const std::string& text) {
  std::vector<ConfigIssue> issues;
  parse_into(text, issues);
  return issues;
}

VtdProfile VtdSpec::build(const GridSpec& grid, const ExponentSpec& exponents) const {
  const int dir = grid.active.front();
  const double two_pi = 2.0 * std::numbers::pi;
  switch (shape) {
    case Shape::constant: return VtdProfile::constant(grid, exponents.build());
    case Shape::eps_sine:
      return VtdProfile::from_eps(
          grid,
          [&](std::span<const double> x) {
            return eps0 * (1.0 + eps_amplitude * std::sin(two_pi * x[static_cast<std::size_t>(dir)]));
          },
          exponents.root);
    case Shape::circle_sine:
      return VtdProfile::from_function(grid, [&](std::span<const double> x) {
        const KasnerExponents q =
            kasner_circle(theta0 + theta_amplitude * std::sin(two_pi * x[static_cast<std::size_t>(dir)]));
        return std::vector<double>(q.q().begin(), q.q().end());
      });
  }
  throw ConfigError("unknown vtd shape");
}

}  // namespace kasnerlab
