#include "kasnerlab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kasnerlab/constraints.hpp"
#include "kasnerlab/norms.hpp"
#include "kasnerlab/tensor_algebra.hpp"

namespace kasnerlab {

namespace {

struct StageStats {
  int solves = 0;
  double max_residual = 0.0;
  double max_deviation = 0.0;

  void add(const LapseSolveReport& r) {
    ++solves;
    max_residual = std::max(max_residual, r.final_residual);
    max_deviation = std::max({max_deviation, std::abs(r.n_min - 1.0), std::abs(r.n_max - 1.0)});
  }
};

void assemble_rates(const EvolState& s, Evaluation& ev) {
  const GridSpec& grid = s.g.grid();
  const int d = grid.dim;
  const int np = grid.num_active();
  const double t = s.t();
  const double t2 = t * t;
  ev.dg = Field(grid, kCovariant2, true);
  ev.dkappa = Field(grid, kMixed);
  FieldJet njet;
  const bool varying_n = !ev.n.data().isConstant(ev.n.data()(0, 0));
  if (varying_n) njet = field_jet(ev.n, true);
  const Eigen::Index d2 = static_cast<Eigen::Index>(d) * d;
  for (int p = 0; p < grid.num_points(); ++p) {
    const double n = ev.n.value(p);
    const auto g = s.g.matrix(p);
    const auto kappa = s.kappa.matrix(p);
    ev.dg.matrix(p) = 2.0 * n * (g * kappa);
    RowMatrix<double> dk = -(1.0 - n) * kappa;
    if (!ev.geometry.ricci_mixed.at(p).isZero(0)) dk -= t2 * n * ev.geometry.ricci_mixed.matrix(p);
    if (varying_n) {
      RowMatrix<double> hess = RowMatrix<double>::Zero(d, d);
      RowMatrix<double> gdn = RowMatrix<double>::Zero(d, d);  // sum_b Gamma^b_{aj} d_b n
      const double* gm = ev.geometry.gamma_mixed.at(p).data();
      for (int a = 0; a < np; ++a) {
        const int da = grid.active[static_cast<std::size_t>(a)];
        for (int b = 0; b < np; ++b) hess(da, grid.active[static_cast<std::size_t>(b)]) = njet.dd(a, b).value(p);
        const double dn = njet.first[static_cast<std::size_t>(a)].value(p);
        if (dn != 0.0) gdn += dn * Eigen::Map<const RowMatrix<double>>(gm + da * d2, d, d);
      }
      dk += t2 * (ev.ginv.matrix(p) * (hess - gdn));
    }
    ev.dkappa.matrix(p) = dk;
  }
}

EvolState advance(const EvolState& s, double h, const Evaluation& k) {
  EvolState out;
  out.tau = s.tau + h;
  out.g = s.g + h * k.dg;
  out.g.make_symmetric();
  out.kappa = s.kappa + h * k.dkappa;
  return out;
}

EvolState step_impl(const EvolState& s, double dtau, const EvolutionOptions& options, const Evaluation& k1,
                    StageStats* stats, Field* tracked_ginv) {
  if (dtau == 0.0) return s;
  const Evaluation k2 = evaluate(advance(s, 0.5 * dtau, k1), options);
  const Evaluation k3 = evaluate(advance(s, 0.5 * dtau, k2), options);
  const Evaluation k4 = evaluate(advance(s, dtau, k3), options);
  if (stats != nullptr) {
    stats->add(k2.lapse);
    stats->add(k3.lapse);
    stats->add(k4.lapse);
  }
  const double w = dtau / 6.0;
  EvolState out;
  out.tau = s.tau + dtau;
  out.g = s.g + w * (k1.dg + 2.0 * k2.dg + 2.0 * k3.dg + k4.dg);
  out.g.make_symmetric();
  out.kappa = s.kappa + w * (k1.dkappa + 2.0 * k2.dkappa + 2.0 * k3.dkappa + k4.dkappa);
  if (options.project_trace) {
    const int d = out.g.dim();
    for (int p = 0; p < out.kappa.num_points(); ++p) {
      auto m = out.kappa.matrix(p);
      const double shift = (m.trace() + 1.0) / d;
      m.diagonal().array() -= shift;
    }
  }
  out.ginv = invert_metric(out.g);
  out.n = k4.n;
  if (tracked_ginv != nullptr) {
    const Field& gi0 = *tracked_ginv;
    const Field r1 = inverse_metric_rate(gi0, s.kappa, k1.n);
    const Field r2 = inverse_metric_rate(gi0 + (0.5 * dtau) * r1, s.kappa + (0.5 * dtau) * k1.dkappa, k2.n);
    const Field r3 = inverse_metric_rate(gi0 + (0.5 * dtau) * r2, s.kappa + (0.5 * dtau) * k2.dkappa, k3.n);
    const Field r4 = inverse_metric_rate(gi0 + dtau * r3, s.kappa + dtau * k3.dkappa, k4.n);
    Field next = gi0 + w * (r1 + 2.0 * r2 + 2.0 * r3 + r4);
    next.make_symmetric();
    *tracked_ginv = next;
  }
  return out;
}

}  // namespace

EvolState EvolState::from_solution(const SolutionState& s) {
  EvolState e;
  e.tau = -std::log(s.t);
  e.g = s.g;
  e.kappa = s.t * s.K;
  e.n = s.n;
  e.ginv = s.ginv.empty() ? invert_metric(s.g) : s.ginv;
  return e;
}

SolutionState EvolState::to_solution() const {
  SolutionState s;
  s.t = t();
  s.g = g;
  s.ginv = ginv.empty() ? invert_metric(g) : ginv;
  s.K = (1.0 / s.t) * kappa;
  s.n = n.empty() ? Field::constant_scalar(g.grid(), 1.0) : n;
  return s;
}

Evaluation evaluate(const EvolState& s, const EvolutionOptions& options) {
  Evaluation ev;
  ev.ginv = invert_metric(s.g);
  ev.metric_jet = field_jet(s.g, true);
  ev.geometry = compute_geometry(s.g, ev.ginv, ev.metric_jet);
  auto [n, report] = solve_lapse(ev.ginv, ev.metric_jet, ev.geometry.scalar_curv, s.t(), options.lapse);
  ev.n = std::move(n);
  ev.lapse = report;
  assemble_rates(s, ev);
  return ev;
}

Evaluation evaluate_with_lapse(const EvolState& s, const Field& n) {
  Evaluation ev;
  ev.ginv = invert_metric(s.g);
  ev.metric_jet = field_jet(s.g, true);
  ev.geometry = compute_geometry(s.g, ev.ginv, ev.metric_jet);
  ev.n = n;
  ev.lapse.iterations = 0;
  ev.lapse.n_min = min_value(n);
  ev.lapse.n_max = max_value(n);
  assemble_rates(s, ev);
  return ev;
}

Rates rhs(const EvolState& s, const EvolutionOptions& options) {
  Evaluation ev = evaluate(s, options);
  return Rates{std::move(ev.dg), std::move(ev.dkappa), std::move(ev.n), ev.lapse};
}

Rates rhs_with_lapse(const EvolState& s, const Field& n) {
  Evaluation ev = evaluate_with_lapse(s, n);
  return Rates{std::move(ev.dg), std::move(ev.dkappa), std::move(ev.n), ev.lapse};
}

Field inverse_metric_rate(const Field& ginv, const Field& kappa, const Field& n) {
  Field out(ginv.grid(), kContravariant2, true);
  for (int p = 0; p < out.num_points(); ++p)
    out.matrix(p) = -2.0 * n.value(p) * (ginv.matrix(p) * kappa.matrix(p).transpose());
  return out;
}

EvolState step(const EvolState& s, double dtau, const EvolutionOptions& options) {
  if (dtau == 0.0) return s;
  return step_impl(s, dtau, options, evaluate(s, options), nullptr, nullptr);
}

EvolState step(const EvolState& s, double dtau, const EvolutionOptions& options, const Evaluation& first_stage) {
  return step_impl(s, dtau, options, first_stage, nullptr, nullptr);
}

void IntegratorConfig::validate() const {
  if (!(dtau > 0.0)) throw ConfigError("integrator.dtau must be positive");
  if (!(t_start > 0.0) || !(t_end > 0.0)) throw ConfigError("integrator.t_start and integrator.t_end must be positive");
  if (!(t_end < t_start))
    throw ConfigError("integrator.t_end must be smaller than integrator.t_start (the run goes toward t = 0)");
  if (!(cmc_drift_ceiling >= 0.0)) throw ConfigError("integrator.cmc_drift_ceiling must be >= 0");
  if (!(residual_ceiling >= 0.0)) throw ConfigError("integrator.residual_ceiling must be >= 0");
  if (kretschmann_every < 0) throw ConfigError("integrator.kretschmann_every must be >= 0");
}

double metric_relative_error(const Field& g, const KasnerExponents& q, double t) {
  double err = 0.0;
  const int d = g.dim();
  std::vector<double> diag(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) diag[static_cast<std::size_t>(i)] = std::pow(t, 2.0 * q[i]);
  for (int p = 0; p < g.num_points(); ++p) {
    const auto m = g.matrix(p);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const double ref = i == j ? diag[static_cast<std::size_t>(i)] : 0.0;
        err = std::max(err, std::abs(m(i, j) - ref) /
                                std::sqrt(diag[static_cast<std::size_t>(i)] * diag[static_cast<std::size_t>(j)]));
      }
  }
  return err;
}

double kappa_relative_error(const Field& kappa, const KasnerExponents& q) {
  double err = 0.0;
  const int d = kappa.dim();
  for (int p = 0; p < kappa.num_points(); ++p) {
    const auto m = kappa.matrix(p);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) err = std::max(err, std::abs(m(i, j) - (i == j ? -q[i] : 0.0)));
  }
  return err / q.max_abs();
}

RunSummary simulate(const SolutionState& initial, const IntegratorConfig& cfg, const SimulationMonitors& monitors) {
  cfg.validate();
  if (std::abs(initial.t - cfg.t_start) > 1e-12 * cfg.t_start)
    throw ConfigError("initial slice is not at integrator.t_start");
  if (monitors.norms) {
    if (!monitors.background) throw ConfigError("norm monitors need background Kasner exponents");
    monitors.norms->validate(*monitors.background);
  }
  if (monitors.background && monitors.background->dim() != initial.g.dim())
    throw ConfigError("background exponents do not match the grid dimension");

  RunSummary summary;
  EvolState state = EvolState::from_solution(initial);
  const double tau_end = -std::log(cfg.t_end);
  std::optional<Field> tracked;
  if (cfg.track_inverse) {
    tracked = state.ginv;
    summary.max_inverse_drift = 0.0;
  }
  StageStats stats;
  int record_index = 0;

  auto abort_run = [&](const std::string& reason) {
    summary.completed = false;
    summary.abort_reason = reason;
    summary.abort_t = state.t();
  };

  while (true) {
    Evaluation ev;
    try {
      ev = evaluate(state, cfg.evolution);
    } catch (const Error& e) {
      abort_run(e.what());
      break;
    }
    stats.add(ev.lapse);
    state.n = ev.n;
    state.ginv = ev.ginv;

    const SolutionState slice = state.to_solution();
    const double t = slice.t;
    DiagnosticsRecord rec;
    rec.t = t;
    rec.tau = state.tau;
    const ConstraintResiduals res = constraint_residuals(slice, ev.geometry);
    rec.hamiltonian_sup = res.hamiltonian_sup;
    rec.momentum_sup = res.momentum_sup;
    rec.cmc_sup = res.cmc_sup;
    rec.n_min = ev.lapse.n_min;
    rec.n_max = ev.lapse.n_max;
    rec.lapse_iterations = ev.lapse.iterations;
    rec.lapse_residual = ev.lapse.final_residual;
    if (monitors.norms) {
      const auto [lg, ln] = low_norms(slice, *monitors.background, *monitors.norms);
      const auto [hg, hn] = high_norms(slice, *monitors.background, *monitors.norms);
      rec.low_g = lg;
      rec.low_n = ln;
      rec.high_g = hg;
      rec.high_n = hn;
    }
    if (cfg.kretschmann_every > 0 && record_index % cfg.kretschmann_every == 0) {
      const Field dt_tk = (-1.0 / t) * ev.dkappa;
      const CurvatureBlocks blocks = curvature_blocks(slice, dt_tk);
      rec.kretschmann_min = min_value(blocks.kretschmann);
      rec.kretschmann_max = max_value(blocks.kretschmann);
    }
    summary.records.push_back(rec);
    ++record_index;
    if (monitors.on_record) monitors.on_record(rec, state);

    const double scaled = res.scaled_max(t);
    const double drift = t * res.cmc_sup;
    summary.max_scaled_residual = std::max(summary.max_scaled_residual, scaled);
    summary.max_cmc_drift = std::max(summary.max_cmc_drift, drift);
    if (!rec.finite()) {
      abort_run("non-finite diagnostics");
      break;
    }
    if (drift > cfg.cmc_drift_ceiling) {
      abort_run("cmc drift " + format_real(drift) + " exceeds ceiling " + format_real(cfg.cmc_drift_ceiling));
      break;
    }
    if (scaled > cfg.residual_ceiling) {
      abort_run("constraint residual " + format_real(scaled) + " exceeds ceiling " + format_real(cfg.residual_ceiling));
      break;
    }
    if (!ev.lapse.definite) {
      abort_run("lapse operator lost definiteness (t^2 |Sc| >= 1)");
      break;
    }
    if (state.tau >= tau_end - 1e-12) {
      summary.completed = true;
      break;
    }
    const double h = std::min(cfg.dtau, tau_end - state.tau);
    try {
      state = step_impl(state, h, cfg.evolution, ev, &stats, tracked ? &*tracked : nullptr);
    } catch (const Error& e) {
      abort_run(e.what());
      break;
    }
    ++summary.steps;
    if (tracked) {
      const double drift_inv = (*tracked - state.ginv).data().cwiseAbs().maxCoeff();
      summary.max_inverse_drift = std::max(summary.max_inverse_drift, drift_inv);
    }
  }

  summary.final_state = state;
  summary.t_final = state.t();
  summary.lapse_solves = stats.solves;
  summary.max_lapse_residual = stats.max_residual;
  summary.max_lapse_deviation = stats.max_deviation;
  if (monitors.background) {
    summary.g_rel_error = metric_relative_error(state.g, *monitors.background, summary.t_final);
    summary.kappa_rel_error = kappa_relative_error(state.kappa, *monitors.background);
  }
  return summary;
}

}  // namespace kasnerlab
