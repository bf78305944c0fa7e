#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kasnerlab/diagnostics.hpp"
#include "kasnerlab/field.hpp"
#include "kasnerlab/geometry.hpp"
#include "kasnerlab/kasner.hpp"
#include "kasnerlab/lapse.hpp"

namespace kasnerlab {

// Evolved variables in log time tau = -ln t: g_ij and kappa^i_j = t K^i_j.
// n and ginv cache the values from the most recent right-hand-side evaluation.
struct EvolState {
  double tau = 0.0;
  Field g;
  Field kappa;
  Field n;
  Field ginv;

  double t() const { return std::exp(-tau); }

  static EvolState from_solution(const SolutionState& s);
  SolutionState to_solution() const;
};

struct EvolutionOptions {
  LapseOptions lapse;
  bool project_trace = false;  // reset tr kappa to -1 after each step
};

// Everything computed at one state during a right-hand-side evaluation.
struct Evaluation {
  Field ginv;
  FieldJet metric_jet;
  GeometryCache geometry;
  Field n;
  LapseSolveReport lapse;
  Field dg;      // d_tau g_ij     = 2 n g_ia kappa^a_j
  Field dkappa;  // d_tau kappa^i_j = -(1-n) kappa + t^2 g^{ia} d_a d_j n - t^2 g^{ia} Gamma^b_{aj} d_b n - t^2 n Ric
};

Evaluation evaluate(const EvolState& s, const EvolutionOptions& options = {});
// Uses the supplied lapse instead of solving for it.
Evaluation evaluate_with_lapse(const EvolState& s, const Field& n);

struct Rates {
  Field dg;
  Field dkappa;
  Field n;
  LapseSolveReport lapse;
};

Rates rhs(const EvolState& s, const EvolutionOptions& options = {});
Rates rhs_with_lapse(const EvolState& s, const Field& n);

// d_tau g^{ij} = -2 n g^{ia} kappa^j_a, for the redundant-inverse consistency check.
Field inverse_metric_rate(const Field& ginv, const Field& kappa, const Field& n);

// Classical RK4 in tau with one lapse solve per stage; g is re-symmetrized
// after the update and the cached n is the last stage's lapse. Throws
// InvalidStateError if g stops being SPD.
EvolState step(const EvolState& s, double dtau, const EvolutionOptions& options = {});
EvolState step(const EvolState& s, double dtau, const EvolutionOptions& options, const Evaluation& first_stage);

enum class IntegrationMethod { rk4 };

struct IntegratorConfig {
  double dtau = 0.01;
  double t_start = 1.0;
  double t_end = 0.01;
  IntegrationMethod method = IntegrationMethod::rk4;
  double cmc_drift_ceiling = 1e-6;  // on sup |tr kappa + 1|
  double residual_ceiling = 1e-6;   // on ConstraintResiduals::scaled_max
  EvolutionOptions evolution;
  int kretschmann_every = 0;        // 0 disables the Kretschmann columns
  bool track_inverse = false;       // also evolve g^{-1} and compare with inversion

  void validate() const;
};

struct SimulationMonitors {
  std::optional<KasnerExponents> background;
  std::optional<NormParams> norms;
  std::function<void(const DiagnosticsRecord&, const EvolState&)> on_record;
};

struct RunSummary {
  bool completed = false;
  std::string abort_reason;
  double abort_t = DiagnosticsRecord::kNaN;
  int steps = 0;
  double t_final = DiagnosticsRecord::kNaN;
  EvolState final_state;
  std::vector<DiagnosticsRecord> records;
  double max_scaled_residual = 0.0;
  double max_cmc_drift = 0.0;
  double max_inverse_drift = DiagnosticsRecord::kNaN;  // when track_inverse
  // Over every lapse solve, including the intermediate RK stages.
  int lapse_solves = 0;
  double max_lapse_residual = 0.0;
  double max_lapse_deviation = 0.0;  // max |n - 1|
  // Against the analytic Kasner background at t_final (when one is supplied):
  // max |g_ij - gK_ij| / sqrt(gK_ii gK_jj) and max |kappa - kappaK| / max|q|.
  double g_rel_error = DiagnosticsRecord::kNaN;
  double kappa_rel_error = DiagnosticsRecord::kNaN;
};

// Steps from cfg.t_start down to cfg.t_end (the last step is shortened to land
// on t_end), emitting a DiagnosticsRecord for the initial slice and every
// accepted step. Stops early, with completed = false and an abort reason, on
// a ceiling violation, lapse failure, or loss of positivity.
RunSummary simulate(const SolutionState& initial, const IntegratorConfig& cfg, const SimulationMonitors& monitors = {});

// Relative errors against an exact Kasner slice, as reported in RunSummary.
double metric_relative_error(const Field& g, const KasnerExponents& q, double t);
double kappa_relative_error(const Field& kappa, const KasnerExponents& q);

}  // namespace kasnerlab
