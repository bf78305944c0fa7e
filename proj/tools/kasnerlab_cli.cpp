// kasnerlab command-line driver.
//
// Exit status: 0 success, 1 usage/configuration/runtime error, 2 a configured
// ceiling or bound was violated.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kasnerlab/config.hpp"
#include "kasnerlab/constraints.hpp"
#include "kasnerlab/diagnostics.hpp"
#include "kasnerlab/evolution.hpp"
#include "kasnerlab/geodesics.hpp"
#include "kasnerlab/geometry.hpp"
#include "kasnerlab/io.hpp"
#include "kasnerlab/kasner.hpp"
#include "kasnerlab/norms.hpp"
#include "kasnerlab/vtd.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace kasnerlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitViolation = 2;

// NaN and infinities become null.
json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

RunConfig base_config(const std::string& config_path, Command command) {
  if (!config_path.empty()) return load_config(config_path);
  return parse_config("[run]\ncommand = " + to_string(command) + "\n");
}

double tk_gnorm_deviation(const SolutionState& s) {
  const Field tk = g_norm(s.t * s.K, s.g, s.ginv);
  double dev = 0.0;
  for (int p = 0; p < tk.num_points(); ++p) dev = std::max(dev, std::abs(tk.value(p) - 1.0));
  return dev;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

// ---------------------------------------------------------------- exponents

struct ExponentsArgs {
  std::string config;
  std::optional<int> dim;
  std::optional<double> eps;
  bool minus_root = false;
};

int run_exponents(const ExponentsArgs& a) {
  RunConfig cfg = base_config(a.config, Command::exponents);
  if (a.dim) cfg.exponents.dim = *a.dim;
  if (a.eps) cfg.exponents.eps = *a.eps;
  if (a.minus_root) cfg.exponents.root = QuadraticRoot::minus;
  const KasnerExponents q = cfg.exponents.build();
  const ExponentReport r = validate_exponents(q);
  std::cout << "index,q\n";
  for (int i = 0; i < q.dim(); ++i) std::cout << i + 1 << ',' << format_real(q[i]) << '\n';
  std::cout << "# sum=" << format_real(r.sum) << " sum_sq=" << format_real(r.sum_sq)
            << " max_abs=" << format_real(r.max_abs) << " moderate=" << (r.moderate ? "true" : "false")
            << " dhs_margin=" << format_real(r.dhs_margin) << " dhs_ok=" << (r.dhs_ok ? "true" : "false") << '\n';
  return kExitOk;
}

// ----------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string config;
  std::optional<double> t_end;
  std::optional<double> dtau;
  std::string output_dir;
};

int run_simulate(const SimulateArgs& a) {
  RunConfig cfg = base_config(a.config, Command::simulate);
  if (a.t_end) cfg.integrator.t_end = *a.t_end;
  if (a.dtau) cfg.integrator.dtau = *a.dtau;
  cfg.integrator.validate();

  const KasnerExponents q = cfg.exponents.build();
  SolutionState initial = kasner_state(q, cfg.integrator.t_start, cfg.grid);
  cfg.perturbation.apply(initial);
  initial.validate();

  const fs::path dir = resolve_output_directory(a.output_dir.empty() ? fs::path(cfg.output.directory) : fs::path(a.output_dir));
  fs::create_directories(dir);
  std::ofstream diag = open_output(dir / cfg.output.diagnostics);
  diag << diagnostics_csv_header() << ",tk_gnorm\n";

  std::unique_ptr<SliceWriter> slices;
  if (cfg.output.slice_every > 0) slices = std::make_unique<SliceWriter>(dir / "slices");

  double tk_initial = DiagnosticsRecord::kNaN;
  double tk_max = 0.0;
  double tk_final = DiagnosticsRecord::kNaN;
  int record_index = 0;

  SimulationMonitors mon;
  mon.background = q;
  mon.norms = cfg.norms;
  mon.on_record = [&](const DiagnosticsRecord& r, const EvolState& s) {
    const SolutionState sol = s.to_solution();
    const double tk = tk_gnorm_deviation(sol);
    if (record_index == 0) tk_initial = tk;
    tk_max = std::max(tk_max, tk);
    tk_final = tk;
    diag << diagnostics_csv_row(r) << ',' << format_real(tk) << '\n';
    if (slices && record_index % cfg.output.slice_every == 0) slices->write(sol);
    ++record_index;
  };

  const RunSummary sum = simulate(initial, cfg.integrator, mon);
  diag.close();
  if (slices && sum.steps > 0 && (record_index - 1) % cfg.output.slice_every != 0)
    slices->write(sum.final_state.to_solution());

  if (cfg.output.final_snapshot && sum.steps > 0) {
    const SolutionState fin = sum.final_state.to_solution();
    write_snapshot(dir / "final_g.csv", fin.g, fin.t);
    write_snapshot(dir / "final_K.csv", fin.K, fin.t);
    write_snapshot(dir / "final_n.csv", fin.n, fin.t);
  }

  json j;
  j["completed"] = sum.completed;
  j["abort_reason"] = sum.abort_reason;
  j["abort_t"] = real(sum.abort_t);
  j["steps"] = sum.steps;
  j["t_final"] = real(sum.t_final);
  j["dim"] = q.dim();
  j["dtau"] = cfg.integrator.dtau;
  j["t_start"] = cfg.integrator.t_start;
  j["t_end"] = cfg.integrator.t_end;
  j["max_scaled_residual"] = real(sum.max_scaled_residual);
  j["max_cmc_drift"] = real(sum.max_cmc_drift);
  j["max_inverse_drift"] = real(sum.max_inverse_drift);
  j["lapse_solves"] = sum.lapse_solves;
  j["max_lapse_residual"] = real(sum.max_lapse_residual);
  j["max_lapse_deviation"] = real(sum.max_lapse_deviation);
  j["g_rel_error"] = real(sum.g_rel_error);
  j["kappa_rel_error"] = real(sum.kappa_rel_error);
  j["tk_gnorm_initial"] = real(tk_initial);
  j["tk_gnorm_max"] = real(tk_max);
  j["tk_gnorm_final"] = real(tk_final);
  if (!sum.records.empty()) {
    const DiagnosticsRecord& last = sum.records.back();
    j["final"] = {{"t", real(last.t)},
                  {"low_g", real(last.low_g)},
                  {"low_n", real(last.low_n)},
                  {"high_g", real(last.high_g)},
                  {"high_n", real(last.high_n)},
                  {"hamiltonian_sup", real(last.hamiltonian_sup)},
                  {"momentum_sup", real(last.momentum_sup)},
                  {"cmc_sup", real(last.cmc_sup)},
                  {"n_min", real(last.n_min)},
                  {"n_max", real(last.n_max)}};
  }
  if (slices) j["slices"] = slices->index_path().string();
  std::ofstream(dir / cfg.output.summary) << j.dump(2) << '\n';

  std::cout << (sum.completed ? "completed" : "aborted") << " steps=" << sum.steps
            << " t_final=" << format_real(sum.t_final) << " g_rel_error=" << format_real(sum.g_rel_error)
            << " kappa_rel_error=" << format_real(sum.kappa_rel_error)
            << " max_scaled_residual=" << format_real(sum.max_scaled_residual)
            << " tk_gnorm_initial=" << format_real(tk_initial) << " tk_gnorm_final=" << format_real(tk_final);
  if (!sum.completed) std::cout << " abort_t=" << format_real(sum.abort_t) << " reason=\"" << sum.abort_reason << '"';
  std::cout << "\nwrote " << (dir / cfg.output.summary).string() << '\n';
  return sum.completed ? kExitOk : kExitViolation;
}

// -------------------------------------------------------------- kretschmann

struct KretschmannArgs {
  std::string config;
  std::vector<double> t_list;
};

int run_kretschmann(const KretschmannArgs& a) {
  RunConfig cfg = base_config(a.config, Command::kretschmann);
  if (!a.t_list.empty()) cfg.kretschmann.t_list = a.t_list;
  const KasnerExponents q = cfg.exponents.build();
  const double c = kretschmann_constant(q);
  std::cout << "t,kretschmann_min,kretschmann_max,analytic\n";
  for (double t : cfg.kretschmann.t_list) {
    const SolutionState s = kasner_state(q, t, cfg.grid);
    const CurvatureBlocks b = curvature_blocks(s, Field(cfg.grid, kMixed));
    std::cout << format_real(t) << ',' << format_real(min_value(b.kretschmann)) << ','
              << format_real(max_value(b.kretschmann)) << ',' << format_real(c / std::pow(t, 4)) << '\n';
  }
  std::cout << "# kretschmann_constant=" << format_real(c) << '\n';
  return kExitOk;
}

// ----------------------------------------------------------------- geodesic

struct GeodesicArgs {
  std::string config;
  std::vector<double> velocity;
  std::optional<double> t_min;
  std::optional<double> sigma;
  std::optional<int> random;
  std::optional<std::uint64_t> seed;
  std::string run;
};

int run_geodesic(const GeodesicArgs& a) {
  RunConfig cfg = base_config(a.config, Command::geodesic);
  GeodesicSpec& g = cfg.geodesic;
  if (!a.velocity.empty()) g.velocity = a.velocity;
  if (a.t_min) g.t_min = *a.t_min;
  if (a.sigma) g.sigma = *a.sigma;
  if (a.random) g.random_starts = *a.random;
  if (a.seed) g.seed = *a.seed;
  if (!a.run.empty()) g.run_index = a.run;

  std::unique_ptr<SpacetimeSampler> st;
  if (g.run_index.empty())
    st = std::make_unique<KasnerSampler>(cfg.exponents.build());
  else
    st = std::make_unique<SliceSampler>(read_slices(g.run_index));
  const int d = st->dim();
  std::vector<double> x0 = g.position.empty() ? std::vector<double>(static_cast<std::size_t>(d), 0.0) : g.position;
  if (static_cast<int>(x0.size()) != d) throw ConfigError("geodesic position needs " + std::to_string(d) + " coordinates");

  std::vector<Eigen::VectorXd> starts;
  if (g.random_starts > 0) {
    starts = random_causal_velocities(*st, g.t_start, x0, g.random_starts, g.seed);
  } else {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d + 1);
    v(0) = -1.0;
    if (!g.velocity.empty()) {
      if (static_cast<int>(g.velocity.size()) != d + 1)
        throw ConfigError("geodesic velocity needs " + std::to_string(d + 1) + " components");
      v = Eigen::Map<const Eigen::VectorXd>(g.velocity.data(), d + 1);
    }
    starts.push_back(v);
  }

  std::cout << "path,affine,t,causal_norm,dt_dA\n";
  int failures = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  double max_drift = 0.0;
  std::vector<std::string> summaries;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const Eigen::VectorXd& v = starts[k];
    const GeodesicPath path =
        integrate_geodesic(*st, g.t_start, x0, std::span<const double>(v.data(), v.size()), g.t_min);
    const std::size_t stride = std::max<std::size_t>(1, path.samples.size() / 200);
    for (std::size_t i = 0; i < path.samples.size(); i += stride) {
      const auto& s = path.samples[i];
      std::cout << k + 1 << ',' << format_real(s.affine) << ',' << format_real(s.t) << ','
                << format_real(s.causal_norm) << ',' << format_real(s.velocity(0)) << '\n';
    }
    const auto& last = path.samples.back();
    std::cout << k + 1 << ',' << format_real(last.affine) << ',' << format_real(last.t) << ','
              << format_real(last.causal_norm) << ',' << format_real(last.velocity(0)) << '\n';
    double drift = 0.0;
    for (const auto& s : path.samples)
      drift = std::max(drift, std::abs(s.causal_norm - path.samples.front().causal_norm));
    max_drift = std::max(max_drift, drift);
    const AffineBound b = affine_bound_check(path, g.sigma);
    min_margin = std::min(min_margin, b.margin);
    if (!path.completed || !b.holds) ++failures;
    std::ostringstream line;
    line << "# path=" << k + 1 << " completed=" << (path.completed ? "true" : "false")
         << " terminal_affine=" << format_real(b.terminal) << " bound=" << format_real(b.bound)
         << " margin=" << format_real(b.margin) << " holds=" << (b.holds ? "true" : "false")
         << " causal_drift=" << format_real(drift);
    if (!path.completed) line << " reason=\"" << path.abort_reason << '"';
    summaries.push_back(line.str());
  }
  for (const auto& s : summaries) std::cout << s << '\n';
  std::cout << "# paths=" << starts.size() << " failures=" << failures << " min_margin=" << format_real(min_margin)
            << " max_causal_drift=" << format_real(max_drift) << " sigma=" << format_real(g.sigma) << '\n';
  return failures == 0 ? kExitOk : kExitViolation;
}

// ---------------------------------------------------------------- vtd-check

struct VtdArgs {
  std::string config;
  std::string profile;
  std::vector<double> t_list;
};

int run_vtd(const VtdArgs& a) {
  RunConfig cfg;
  if (!a.config.empty()) {
    cfg = load_config(a.config);
  } else {
    // Built-in profiles, swept over 12 log-spaced times in [1e-3, 10^-0.25].
    const std::string p = a.profile.empty() ? "moderate" : a.profile;
    std::string text = "[run]\ncommand = vtd-check\n";
    if (p == "moderate")
      text += "[exponents]\ndim = 38\n[grid]\npoints = 16\n[vtd]\nshape = eps_sine\n";
    else if (p == "contrast")
      text += "[exponents]\nfamily = kasner_circle\ndim = 3\n[grid]\npoints = 32\n[vtd]\nshape = circle_sine\n";
    else if (p == "constant")
      text += "[exponents]\ndim = 38\n[grid]\npoints = 16\n[vtd]\nshape = constant\n";
    else
      throw ConfigError("unknown profile '" + p + "' (moderate, contrast or constant)");
    std::string sep = "t_list = ";
    for (double t : log_spaced_times(std::pow(10.0, -0.25), 1e-3, 12)) {
      text += sep + format_real(t);
      sep = ", ";
    }
    text += "\n";
    cfg = parse_config(text);
  }
  if (!a.t_list.empty()) cfg.vtd.t_list = a.t_list;
  const VtdProfile profile = cfg.vtd.build(cfg.grid, cfg.exponents);
  const RicciDecay r = ricci_decay_check(profile, cfg.vtd.t_list);
  std::cout << "t,sup_t2_ricci\n";
  for (std::size_t i = 0; i < r.t.size(); ++i)
    std::cout << format_real(r.t[i]) << ',' << format_real(r.sup_t2_ricci[i]) << '\n';
  std::cout << "# slope=" << (r.slope ? format_real(*r.slope) : std::string("n/a"))
            << " strictly_decreasing=" << (r.strictly_decreasing ? "true" : "false") << '\n';
  return kExitOk;
}

// ------------------------------------------------------------- check-config

int run_check_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto issues = check_config(buf.str());
  if (issues.empty()) {
    std::cout << path << ": ok\n";
    return kExitOk;
  }
  for (const auto& i : issues) std::cout << path << ": " << i.path << ": " << i.message << '\n';
  return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kasner-background evolution, curvature, geodesic and VTD checks"};
  app.require_subcommand(1);

  ExponentsArgs ex;
  auto* c_ex = app.add_subcommand("exponents", "Print the exponent family as CSV (index,q) with a report line");
  c_ex->add_option("--config", ex.config, "Config file");
  c_ex->add_option("--dim", ex.dim, "Spatial dimension D (>= 38)");
  c_ex->add_option("--eps", ex.eps, "Construction parameter eps > 0");
  c_ex->add_flag("--minus-root", ex.minus_root, "Take the minus root for the last pair");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Evolve perturbed Kasner data; writes diagnostics CSV and summary JSON");
  c_sim->add_option("--config", sim.config, "Config file");
  c_sim->add_option("--t-end", sim.t_end, "Override integrator.t_end");
  c_sim->add_option("--dtau", sim.dtau, "Override integrator.dtau");
  c_sim->add_option("--output-dir", sim.output_dir, "Override output.directory (KASNERLAB_OUTPUT_DIR wins)");

  KretschmannArgs kr;
  auto* c_kr = app.add_subcommand("kretschmann", "Kretschmann scalar of exact Kasner slices vs C t^-4");
  c_kr->add_option("--config", kr.config, "Config file");
  c_kr->add_option("--t", kr.t_list, "Times (repeatable or comma separated)")->delimiter(',');

  GeodesicArgs ge;
  auto* c_ge = app.add_subcommand("geodesic", "Integrate past-directed causal geodesics and check the affine bound");
  c_ge->add_option("--config", ge.config, "Config file");
  c_ge->add_option("--velocity", ge.velocity, "Initial (dt/dA, dx^1/dA, ...), comma separated")->delimiter(',');
  c_ge->add_option("--t-min", ge.t_min, "Stop at this t");
  c_ge->add_option("--sigma", ge.sigma, "sigma in the bound |A'(1)| / (1 - sigma)");
  c_ge->add_option("--random", ge.random, "Number of random causal starts");
  c_ge->add_option("--seed", ge.seed, "Seed for --random");
  c_ge->add_option("--run", ge.run, "slices.csv index written by simulate (default: analytic Kasner)");

  VtdArgs vt;
  auto* c_vt = app.add_subcommand("vtd-check", "sup |t^2 Ric| of a VTD metric over a t list and its log-log slope");
  c_vt->add_option("--config", vt.config, "Config file");
  c_vt->add_option("--profile", vt.profile, "Built-in profile when no config: moderate, contrast or constant");
  c_vt->add_option("--t", vt.t_list, "Times, strictly decreasing")->delimiter(',');

  std::string check_path;
  auto* c_ck = app.add_subcommand("check-config", "Validate a config file and list every problem");
  c_ck->add_option("file", check_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*c_ex) return run_exponents(ex);
    if (*c_sim) return run_simulate(sim);
    if (*c_kr) return run_kretschmann(kr);
    if (*c_ge) return run_geodesic(ge);
    if (*c_vt) return run_vtd(vt);
    if (*c_ck) return run_check_config(check_path);
  } catch (const ConfigValidationError& e) {
    for (const auto& i : e.issues()) std::cerr << "config: " << i.path << ": " << i.message << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
