#include <doctest.h>

#include <cmath>

#include "kasnerlab/constraints.hpp"
#include "kasnerlab/evolution.hpp"
#include "test_support.hpp"

using namespace kasnerlab;
using kasnerlab::testing::kTwoPi;
using kasnerlab::testing::max_abs;
using kasnerlab::testing::sample_scalar;

namespace {

const KasnerExponents kQ3({2.0 / 3.0, 2.0 / 3.0, -1.0 / 3.0});

double kasner_metric_error(const EvolState& s, const KasnerExponents& q) {
  return metric_relative_error(s.g, q, s.t());
}

}  // namespace

TEST_CASE("rhs on exact Kasner: kappa is a fixed point and g is exponential") {
  const KasnerExponents q = construct_exponents(38, 0.001);
  const EvolState s = EvolState::from_solution(kasner_state(q, 0.3, line_grid(38, 0, 8)));
  const Rates r = rhs(s);
  CHECK(max_abs(r.dkappa) == 0.0);
  CHECK(r.lapse.iterations == 0);
  for (int i = 0; i < 38; ++i)
    CHECK(r.dg.matrix(3)(i, i) == doctest::Approx(-2.0 * q[i] * s.g.matrix(3)(i, i)).epsilon(1e-14));
  CHECK(max_abs(r.n - Field::constant_scalar(s.g.grid(), 1.0)) == 0.0);
}

TEST_CASE("constant lapse offset gives d_tau kappa = -delta q") {
  const KasnerExponents q = construct_exponents(38, 0.001);
  const GridSpec grid = line_grid(38, 0, 8);
  const EvolState s = EvolState::from_solution(kasner_state(q, 0.5, grid));
  const double delta = 1e-3;
  const Rates r = rhs_with_lapse(s, Field::constant_scalar(grid, 1.0 + delta));
  for (int i = 0; i < 38; ++i) CHECK(r.dkappa.matrix(0)(i, i) == doctest::Approx(-delta * q[i]).epsilon(1e-12));
  Eigen::MatrixXd off = r.dkappa.matrix(0);
  off.diagonal().setZero();
  CHECK(off.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("flat metric with a varying lapse: dkappa = -(1 - n) kappa + t^2 d d n") {
  const GridSpec grid{3, {0, 1}, {16, 16}};
  SolutionState sol;
  sol.t = 0.6;
  sol.g = Field::constant(grid, kCovariant2, Eigen::MatrixXd::Identity(3, 3).reshaped(), true);
  sol.ginv = sol.g;
  Eigen::Vector3d k(-0.5, -0.25, -0.25);
  sol.K = Field::constant(grid, kMixed, Eigen::MatrixXd((k / sol.t).asDiagonal()).reshaped());
  sol.n = Field::constant_scalar(grid, 1.0);
  const EvolState s = EvolState::from_solution(sol);
  const Field n = sample_scalar(grid, [](const auto& x) {
    return 1.0 + 0.01 * std::sin(kTwoPi * x[0]) * std::cos(kTwoPi * x[1]);
  });
  const Rates r = rhs_with_lapse(s, n);
  double err = 0.0;
  const double t2 = sol.t * sol.t;
  const double w2 = kTwoPi * kTwoPi;
  for (int p = 0; p < grid.num_points(); ++p) {
    const auto x = grid.position(p);
    const double sx = std::sin(kTwoPi * x[0]), cx = std::cos(kTwoPi * x[0]);
    const double sy = std::sin(kTwoPi * x[1]), cy = std::cos(kTwoPi * x[1]);
    Eigen::Matrix3d hess = Eigen::Matrix3d::Zero();
    hess(0, 0) = hess(1, 1) = -0.01 * w2 * sx * cy;
    hess(0, 1) = hess(1, 0) = -0.01 * w2 * cx * sy;
    const Eigen::Matrix3d exact = -(1.0 - n.value(p)) * Eigen::Matrix3d(k.asDiagonal()) + t2 * hess;
    err = std::max(err, (r.dkappa.matrix(p) - exact).cwiseAbs().maxCoeff());
    CHECK((r.dg.matrix(p) - 2.0 * n.value(p) * Eigen::Matrix3d(k.asDiagonal())).cwiseAbs().maxCoeff() <= 1e-15);
  }
  CHECK(err <= 1e-12);
}

TEST_CASE("homogeneous Bianchi I data against the diagonal ODE reduction") {
  // Spatially homogeneous diagonal data: Ric = Sc = 0, so the lapse is 1 and
  // d_tau g_ii = 2 kappa_i g_ii, d_tau kappa = 0. Integrated exactly:
  // g_ii(tau) = g_ii(0) exp(2 kappa_i tau).
  const GridSpec grid = line_grid(4, 0, 8);
  const Eigen::Vector4d g0(1.3, 0.7, 2.0, 1.1);
  const Eigen::Vector4d kap(-0.6, -0.1, -0.45, 0.15);
  SolutionState sol;
  sol.t = 1.0;
  sol.g = Field::constant(grid, kCovariant2, Eigen::MatrixXd(g0.asDiagonal()).reshaped(), true);
  sol.ginv = invert_metric(sol.g);
  sol.K = Field::constant(grid, kMixed, Eigen::MatrixXd(kap.asDiagonal()).reshaped());
  sol.n = Field::constant_scalar(grid, 1.0);
  EvolState s = EvolState::from_solution(sol);
  const Rates r = rhs(s);
  for (int i = 0; i < 4; ++i) CHECK(r.dg.matrix(0)(i, i) == doctest::Approx(2 * kap(i) * g0(i)).epsilon(1e-15));
  CHECK(max_abs(r.dkappa) == 0.0);
  for (int k = 0; k < 50; ++k) s = step(s, 0.02);
  for (int i = 0; i < 4; ++i)
    CHECK(s.g.matrix(5)(i, i) == doctest::Approx(g0(i) * std::exp(2 * kap(i) * 1.0)).epsilon(1e-8));
}

TEST_CASE("one RK4 step on Kasner and the zero step") {
  const KasnerExponents q = construct_exponents(38, 0.001);
  const EvolState s = EvolState::from_solution(kasner_state(q, 1.0, line_grid(38, 0, 8)));
  const EvolState a = step(s, 0.01);
  CHECK(a.tau == doctest::Approx(0.01));
  for (int i = 0; i < 38; ++i)
    CHECK(a.g.matrix(2)(i, i) == doctest::Approx(std::exp(-2 * q[i] * 0.01)).epsilon(1e-12));
  const EvolState z = step(s, 0.0);
  CHECK(z.tau == s.tau);
  CHECK(max_abs(z.g - s.g) == 0.0);
  CHECK(max_abs(z.kappa - s.kappa) == 0.0);
  CHECK(a.g.matrix(1).isApprox(a.g.matrix(1).transpose(), 0.0));
}

TEST_CASE("RK4 converges at fourth order on Kasner") {
  std::vector<double> errors;
  for (double dtau : {0.4, 0.2, 0.1}) {
    EvolState s = EvolState::from_solution(kasner_state(kQ3, 1.0, line_grid(3, 0, 8)));
    const int n = static_cast<int>(std::lround(4.0 / dtau));
    for (int k = 0; k < n; ++k) s = step(s, dtau);
    errors.push_back(kasner_metric_error(s, kQ3));
  }
  CHECK(errors[0] / errors[1] == doctest::Approx(16.0).epsilon(0.2));
  CHECK(errors[1] / errors[2] == doctest::Approx(16.0).epsilon(0.2));
}

TEST_CASE("IntegratorConfig validation") {
  IntegratorConfig c;
  CHECK_NOTHROW(c.validate());
  c.t_end = 2.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.dtau = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.t_end = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.cmc_drift_ceiling = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("simulate an exact Kasner run with the analytic oracle") {
  const KasnerExponents q = construct_exponents(38, 0.001);
  IntegratorConfig cfg;
  cfg.t_end = 0.5;
  cfg.kretschmann_every = 20;
  cfg.track_inverse = true;
  SimulationMonitors mon;
  mon.background = q;
  mon.norms = NormParams{0.166, 0.0002, 1.0, 2};
  int seen = 0;
  mon.on_record = [&](const DiagnosticsRecord& r, const EvolState&) {
    ++seen;
    CHECK(r.finite());
  };
  const RunSummary sum = simulate(kasner_state(q, 1.0, line_grid(38, 0, 16)), cfg, mon);
  CHECK(sum.completed);
  CHECK(sum.t_final == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(sum.steps == 70);
  CHECK(seen == static_cast<int>(sum.records.size()));
  CHECK(sum.records.size() == 71);
  CHECK(sum.g_rel_error <= 1e-8);
  CHECK(sum.kappa_rel_error <= 1e-8);
  CHECK(sum.max_scaled_residual <= 1e-9);
  CHECK(sum.max_lapse_deviation == 0.0);
  CHECK(sum.max_lapse_residual <= 1e-12);
  CHECK(sum.lapse_solves >= 4 * sum.steps);
  CHECK(sum.max_inverse_drift <= 1e-8);
  CHECK(sum.records.front().kretschmann_max ==
        doctest::Approx(kretschmann_constant(q)).epsilon(1e-8));
  CHECK(sum.records.back().low_g <= 1e-8);
  CHECK(std::isnan(sum.records[1].kretschmann_min));
}

TEST_CASE("simulate aborts when a ceiling is violated") {
  const GridSpec grid = line_grid(3, 0, 16);
  SolutionState s = kasner_state(kQ3, 1.0, grid);
  for (int p = 0; p < 16; ++p) s.g.matrix(p)(1, 1) += 1e-4 * std::sin(kTwoPi * grid.coordinate(p, 0));
  s.ginv = invert_metric(s.g);
  IntegratorConfig cfg;
  cfg.t_end = 0.5;
  cfg.residual_ceiling = 0.0;
  const RunSummary sum = simulate(s, cfg);
  CHECK_FALSE(sum.completed);
  CHECK(sum.abort_t == 1.0);
  CHECK(sum.abort_reason.find("residual") != std::string::npos);
  CHECK(sum.steps == 0);
}

TEST_CASE("trace projection keeps tr kappa = -1") {
  const GridSpec grid = line_grid(3, 0, 16);
  SolutionState s = kasner_state(kQ3, 1.0, grid);
  for (int p = 0; p < 16; ++p) s.K.matrix(p)(0, 1) += 1e-3 * std::cos(kTwoPi * grid.coordinate(p, 0));
  EvolutionOptions opt;
  opt.project_trace = true;
  EvolState e = EvolState::from_solution(s);
  for (int k = 0; k < 5; ++k) e = step(e, 0.05, opt);
  for (int p = 0; p < 16; ++p) CHECK(e.kappa.matrix(p).trace() == doctest::Approx(-1.0).epsilon(1e-14));
}
