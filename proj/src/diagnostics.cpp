#include "kasnerlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "kasnerlab/norms.hpp"

namespace kasnerlab {

void NormParams::validate(const KasnerExponents& q) const {
  const double m = q.max_abs();
  auto fail = [](const std::string& what) { throw ConfigError("norm parameters violate " + what); };
  if (!(gamma > 0.0)) fail("0 < gamma");
  if (!(gamma + m < sigma)) fail("gamma + max|q| < sigma");
  if (!(sigma + 2.0 * gamma < 1.0 / 6.0)) fail("sigma + 2 gamma < 1/6");
  if (!(A >= 1.0)) fail("A >= 1");
  if (N_num < 2 || N_num > 6) fail("2 <= N_num <= 6");
}

double LowNormEntries::low_g() const { return std::max({metric, inverse_metric, second_fund, tk_gnorm}); }

const std::array<const char*, HighNormEntries::kMetricEntries> HighNormEntries::metric_names = {
    "K_Hdot_N_g",       "dg_Hdot_N_g",      "K_Hdot_Nm1_g",      "K_Hdot_Nm1_frame",
    "g_Hdot_N_g",       "ginv_Hdot_N_g",    "dg_Hdot_Nm1_g",     "g_Hdot_N_frame",
    "ginv_Hdot_N_frame", "g_Hdot_Nm1_frame", "ginv_Hdot_Nm1_frame"};

const std::array<const char*, HighNormEntries::kLapseEntries> HighNormEntries::lapse_names = {
    "dn_Hdot_N_g", "n_Hdot_N", "n_Hdot_Nm1"};

double HighNormEntries::high_g() const { return *std::max_element(metric.begin(), metric.end()); }
double HighNormEntries::high_n() const { return *std::max_element(lapse.begin(), lapse.end()); }

LowNormEntries low_norm_entries(const SolutionState& s, const KasnerExponents& q, const NormParams& p) {
  p.validate(q);
  const SolutionState bg = kasner_state(q, s.t, s.g.grid());
  const double t = s.t;
  LowNormEntries e;
  const double w2s = std::pow(t, 2.0 * p.sigma);
  e.metric = w2s * sup_norm(frame_norm(s.g - bg.g));
  e.inverse_metric = w2s * sup_norm(frame_norm(s.ginv - bg.ginv));
  e.second_fund = t * w_inf_norm(s.K - bg.K, 2);
  const Field tk_norm = g_norm(t * s.K, s.g, s.ginv);
  double dev = 0.0;
  for (int i = 0; i < tk_norm.num_points(); ++i) dev = std::max(dev, std::abs(tk_norm.value(i) - 1.0));
  e.tk_gnorm = dev;
  Field nm1 = s.n;
  nm1.data().array() -= 1.0;
  e.lapse = std::pow(t, -(2.0 - 10.0 * p.sigma - p.gamma)) * sup_norm(nm1);
  return e;
}

std::pair<double, double> low_norms(const SolutionState& s, const KasnerExponents& q, const NormParams& p) {
  const LowNormEntries e = low_norm_entries(s, q, p);
  return {e.low_g(), e.low_n()};
}

HighNormEntries high_norm_entries(const SolutionState& s, const KasnerExponents& q, const NormParams& p) {
  p.validate(q);
  const double t = s.t;
  const double a = p.A;
  const double sg = p.sigma;
  const double gm = p.gamma;
  const int n = p.N_num;
  const auto hom = SobolevKind::homogeneous;
  HighNormEntries e;
  const double w1 = std::pow(t, a + 1.0);
  const double w3 = std::pow(t, a + 3.0 * sg + gm);
  const double wsg = std::pow(t, a + sg + gm);
  const double w2 = std::pow(t, a + 2.0 * sg + gm);
  const double w5 = std::pow(t, a + 5.0 * sg + 3.0 * gm - 1.0);
  e.metric[0] = w1 * sobolev_norm(s.K, n, hom, s.g, s.ginv);
  e.metric[1] = w1 * gradient_sobolev_norm(s.g, n, hom, s.g, s.ginv);
  e.metric[2] = w3 * sobolev_norm(s.K, n - 1, hom, s.g, s.ginv);
  e.metric[3] = w3 * sobolev_norm(s.K, n - 1, hom);
  e.metric[4] = wsg * sobolev_norm(s.g, n, hom, s.g, s.ginv);
  e.metric[5] = wsg * sobolev_norm(s.ginv, n, hom, s.g, s.ginv);
  e.metric[6] = w2 * gradient_sobolev_norm(s.g, n - 1, hom, s.g, s.ginv);
  e.metric[7] = w2 * sobolev_norm(s.g, n, hom);
  e.metric[8] = w2 * sobolev_norm(s.ginv, n, hom);
  e.metric[9] = w5 * sobolev_norm(s.g, n - 1, hom);
  e.metric[10] = w5 * sobolev_norm(s.ginv, n - 1, hom);
  e.lapse[0] = w1 * gradient_sobolev_norm(s.n, n, hom, s.g, s.ginv);
  e.lapse[1] = std::pow(t, a) * sobolev_norm(s.n, n, hom);
  e.lapse[2] = std::pow(t, a + sg - 1.0) * sobolev_norm(s.n, n - 1, hom);
  return e;
}

std::pair<double, double> high_norms(const SolutionState& s, const KasnerExponents& q, const NormParams& p) {
  const HighNormEntries e = high_norm_entries(s, q, p);
  return {e.high_g(), e.high_n()};
}

bool DiagnosticsRecord::finite() const {
  for (double v : {t, tau, low_g, low_n, high_g, high_n, hamiltonian_sup, momentum_sup, cmc_sup, kretschmann_min,
                   kretschmann_max, n_min, n_max, lapse_residual})
    if (!std::isnan(v) && !std::isfinite(v)) return false;
  return true;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string diagnostics_csv_header() {
  return "t,tau,low_g,low_n,high_g,high_n,hamiltonian_sup,momentum_sup,cmc_sup,kretschmann_min,kretschmann_max,"
         "n_min,n_max,lapse_iterations,lapse_residual";
}

std::string diagnostics_csv_row(const DiagnosticsRecord& r) {
  std::ostringstream out;
  for (double v : {r.t, r.tau, r.low_g, r.low_n, r.high_g, r.high_n, r.hamiltonian_sup, r.momentum_sup, r.cmc_sup,
                   r.kretschmann_min, r.kretschmann_max, r.n_min, r.n_max})
    out << format_real(v) << ',';
  out << r.lapse_iterations << ',' << format_real(r.lapse_residual);
  return out.str();
}

}  // namespace kasnerlab
