#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "kasnerlab/diagnostics.hpp"
#include "kasnerlab/kasner.hpp"
#include "test_support.hpp"

using namespace kasnerlab;
using kasnerlab::testing::kTwoPi;

namespace {

// D = 64: thirty-six +1/8 and twenty-eight -1/8 (sum 1, sum of squares 1).
KasnerExponents eighth_family() {
  std::vector<double> q(64, -0.125);
  for (int i = 0; i < 36; ++i) q[static_cast<std::size_t>(i)] = 0.125;
  return KasnerExponents(q);
}

const NormParams kNarrow{0.166, 0.0002, 1.0, 2};

SolutionState with_g_mode(const KasnerExponents& q, double t, double a) {
  const GridSpec grid = line_grid(q.dim(), 0, 16);
  SolutionState s = kasner_state(q, t, grid);
  for (int p = 0; p < grid.num_points(); ++p) s.g.matrix(p)(0, 0) += a * std::sin(kTwoPi * grid.coordinate(p, 0));
  s.ginv = invert_metric(s.g);
  return s;
}

SolutionState with_k_mode(const KasnerExponents& q, double t, double a) {
  const GridSpec grid = line_grid(q.dim(), 0, 16);
  SolutionState s = kasner_state(q, t, grid);
  for (int p = 0; p < grid.num_points(); ++p) s.K.matrix(p)(1, 2) += a * std::cos(kTwoPi * grid.coordinate(p, 0));
  return s;
}

}  // namespace

TEST_CASE("NormParams validation follows the exponent chain") {
  const KasnerExponents q = construct_exponents(38, 0.001);
  CHECK_NOTHROW(kNarrow.validate(q));
  CHECK_THROWS_AS((NormParams{0.16, 0.0002}).validate(q), ConfigError);   // gamma + max|q| >= sigma
  CHECK_THROWS_AS((NormParams{0.166, 0.0005}).validate(q), ConfigError);  // sigma + 2 gamma >= 1/6
  CHECK_THROWS_AS((NormParams{0.166, 0.0}).validate(q), ConfigError);
  CHECK_THROWS_AS((NormParams{0.166, 0.0002, 0.5}).validate(q), ConfigError);
  CHECK_THROWS_AS((NormParams{0.166, 0.0002, 1.0, 1}).validate(q), ConfigError);
  CHECK_THROWS_AS((NormParams{0.166, 0.0002, 1.0, 7}).validate(q), ConfigError);
  // sigma = 0.15, gamma = 0.01 has sigma + 2 gamma = 0.17 > 1/6 for any exponents.
  CHECK_THROWS_AS((NormParams{0.15, 0.01}).validate(eighth_family()), ConfigError);
}

TEST_CASE("both norm families vanish on exact Kasner at every t") {
  const KasnerExponents q = construct_exponents(38, 0.001);
  for (double t : {1.0, 0.2, 0.01}) {
    const SolutionState s = kasner_state(q, t, line_grid(38, 0, 8));
    const auto [lg, ln] = low_norms(s, q, kNarrow);
    const auto [hg, hn] = high_norms(s, q, kNarrow);
    CHECK(lg <= 1e-13);
    CHECK(ln == 0.0);
    CHECK(hg == 0.0);
    CHECK(hn == 0.0);
  }
}

TEST_CASE("constant lapse offset: low_n is the weighted offset") {
  const KasnerExponents q = eighth_family();
  const NormParams p{0.15, 0.008};
  SolutionState s = kasner_state(q, 0.5, line_grid(64, 0, 8));
  s.n.data().array() += 1e-4;
  const auto [lg, ln] = low_norms(s, q, p);
  CHECK(lg <= 1e-13);
  CHECK(ln == doctest::Approx(std::pow(0.5, -(2.0 - 1.5 - 0.008)) * 1e-4).epsilon(1e-10));
  CHECK(ln == doctest::Approx(1.4043e-4).epsilon(2e-3));
}

TEST_CASE("scaling K by 1 + delta gives tk_gnorm = delta") {
  const KasnerExponents q = construct_exponents(38, 0.001);
  SolutionState s = kasner_state(q, 0.3, line_grid(38, 0, 8));
  s.K *= 1.0 + 1e-3;
  const LowNormEntries e = low_norm_entries(s, q, kNarrow);
  CHECK(e.tk_gnorm == doctest::Approx(1e-3).epsilon(1e-9));
  // t ||K - K_K||_{W^{2,inf}} = delta |q| since K is spatially constant.
  double qn = 0.0;
  for (double v : q.q()) qn += v * v;
  CHECK(e.second_fund == doctest::Approx(1e-3 * std::sqrt(qn)).epsilon(1e-9));
}

TEST_CASE("single-mode g perturbation at t = 1 against Fourier-mode norms") {
  const KasnerExponents q = construct_exponents(38, 0.001);
  const double a = 1e-4;
  const SolutionState s = with_g_mode(q, 1.0, a);
  const HighNormEntries e = high_norm_entries(s, q, kNarrow);
  const double r2 = std::sqrt(0.5);
  // Frame entries of g are exact: ||d^m (a sin)||_{L^2} = a (2 pi)^m / sqrt 2.
  CHECK(e.metric[7] == doctest::Approx(a * std::pow(kTwoPi, 2) * r2).epsilon(1e-12));
  CHECK(e.metric[9] == doctest::Approx(a * kTwoPi * r2).epsilon(1e-12));
  // g-weighted and inverse-metric entries agree to first order in a.
  CHECK(e.metric[4] == doctest::Approx(a * std::pow(kTwoPi, 2) * r2).epsilon(5 * a));
  CHECK(e.metric[1] == doctest::Approx(a * std::pow(kTwoPi, 3) * r2).epsilon(5 * a));
  CHECK(e.metric[8] == doctest::Approx(a * std::pow(kTwoPi, 2) * r2).epsilon(5 * a));
  CHECK(e.metric[0] == 0.0);
  CHECK(e.high_g() == doctest::Approx(a * std::pow(kTwoPi, 3) * r2).epsilon(5 * a));
  CHECK(e.high_n() == 0.0);
  const LowNormEntries l = low_norm_entries(s, q, kNarrow);
  CHECK(l.metric == doctest::Approx(a).epsilon(1e-3));
}

TEST_CASE("K perturbation: high_g is homogeneous and monotone in amplitude") {
  const KasnerExponents q = construct_exponents(38, 0.001);
  double prev = 0.0;
  for (double a : {1e-5, 2e-5, 4e-5, 1e-4}) {
    const HighNormEntries e = high_norm_entries(with_k_mode(q, 0.5, a), q, kNarrow);
    CHECK(e.high_g() > prev);
    prev = e.high_g();
  }
  const HighNormEntries e1 = high_norm_entries(with_k_mode(q, 0.5, 1e-5), q, kNarrow);
  const HighNormEntries e2 = high_norm_entries(with_k_mode(q, 0.5, 2e-5), q, kNarrow);
  CHECK(e2.high_g() == doctest::Approx(2 * e1.high_g()).epsilon(1e-12));
  for (int i = 0; i < HighNormEntries::kMetricEntries; ++i)
    CHECK(e2.metric[static_cast<std::size_t>(i)] ==
          doctest::Approx(2 * e1.metric[static_cast<std::size_t>(i)]).epsilon(1e-12));
  CHECK(HighNormEntries::metric_names[0] == std::string("K_Hdot_N_g"));
  CHECK(HighNormEntries::lapse_names[2] == std::string("n_Hdot_Nm1"));
}

TEST_CASE("lapse high entries on a lapse mode") {
  const KasnerExponents q = construct_exponents(38, 0.001);
  const GridSpec grid = line_grid(38, 0, 16);
  SolutionState s = kasner_state(q, 1.0, grid);
  const double a = 1e-3;
  for (int p = 0; p < 16; ++p) s.n(p, 0) += a * std::sin(kTwoPi * grid.coordinate(p, 0));
  const HighNormEntries e = high_norm_entries(s, q, kNarrow);
  const double r2 = std::sqrt(0.5);
  CHECK(e.lapse[1] == doctest::Approx(a * kTwoPi * kTwoPi * r2).epsilon(1e-12));
  CHECK(e.lapse[2] == doctest::Approx(a * kTwoPi * r2).epsilon(1e-12));
  CHECK(e.lapse[0] == doctest::Approx(a * std::pow(kTwoPi, 3) * r2).epsilon(1e-12));  // g = I at t = 1
  CHECK(e.high_n() == e.lapse[0]);
}

TEST_CASE("diagnostics CSV schema and number formatting") {
  const std::string header = diagnostics_csv_header();
  CHECK(header.rfind("t,tau,low_g,low_n,high_g,high_n", 0) == 0);
  DiagnosticsRecord r;
  r.t = 0.5;
  r.tau = std::log(2.0);
  r.lapse_iterations = 3;
  const std::string row = diagnostics_csv_row(r);
  const auto commas = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  CHECK(commas(row) == commas(header));
  CHECK(row.rfind("0.5,0.69314718055994529,nan", 0) == 0);
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(r.finite());
  r.high_g = std::numeric_limits<double>::infinity();
  CHECK_FALSE(r.finite());
}
