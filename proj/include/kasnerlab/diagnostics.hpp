#pragma once

#include <array>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>

#include "kasnerlab/field.hpp"
#include "kasnerlab/kasner.hpp"

namespace kasnerlab {

// Weights of the t-weighted solution norms.
struct NormParams {
  double sigma = 0.0;  // worst-exponent weight
  double gamma = 0.0;  // room
  double A = 1.0;      // blow-up exponent, >= 1
  int N_num = 2;       // derivative order standing in for N

  // 0 < gamma < gamma + max|q| < sigma < sigma + 2 gamma < 1/6, A >= 1,
  // 2 <= N_num <= 6. Throws ConfigError naming the violated link.
  void validate(const KasnerExponents& q) const;
};

struct LowNormEntries {
  double metric = 0.0;         // t^{2 sigma} ||g - g_K||_{L^inf Frame}
  double inverse_metric = 0.0; // t^{2 sigma} ||g^{-1} - g_K^{-1}||_{L^inf Frame}
  double second_fund = 0.0;    // t ||K - K_K||_{W^{2,inf} Frame}
  double tk_gnorm = 0.0;       // || |t K|_g - 1 ||_{L^inf}
  double lapse = 0.0;          // t^{-(2 - 10 sigma - gamma)} ||n - 1||_{L^inf}

  double low_g() const;
  double low_n() const { return lapse; }
};

struct HighNormEntries {
  static constexpr int kMetricEntries = 11;
  static constexpr int kLapseEntries = 3;
  static const std::array<const char*, kMetricEntries> metric_names;
  static const std::array<const char*, kLapseEntries> lapse_names;

  std::array<double, kMetricEntries> metric{};
  std::array<double, kLapseEntries> lapse{};

  double high_g() const;
  double high_n() const;
};

// Background Kasner quantities are evaluated analytically at state.t.
LowNormEntries low_norm_entries(const SolutionState& state, const KasnerExponents& q, const NormParams& p);
std::pair<double, double> low_norms(const SolutionState& state, const KasnerExponents& q, const NormParams& p);

HighNormEntries high_norm_entries(const SolutionState& state, const KasnerExponents& q, const NormParams& p);
std::pair<double, double> high_norms(const SolutionState& state, const KasnerExponents& q, const NormParams& p);

struct DiagnosticsRecord {
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  double t = kNaN;
  double tau = kNaN;
  double low_g = kNaN;
  double low_n = kNaN;
  double high_g = kNaN;
  double high_n = kNaN;
  double hamiltonian_sup = kNaN;
  double momentum_sup = kNaN;
  double cmc_sup = kNaN;
  double kretschmann_min = kNaN;
  double kretschmann_max = kNaN;
  double n_min = kNaN;
  double n_max = kNaN;
  int lapse_iterations = 0;
  double lapse_residual = kNaN;

  bool finite() const;
};

// Fixed column order, one header line.
std::string diagnostics_csv_header();
std::string diagnostics_csv_row(const DiagnosticsRecord& r);

// Real numbers for CSV/JSON output: 17 significant digits.
std::string format_real(double v);

}  // namespace kasnerlab
