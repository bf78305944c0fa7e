#pragma once

#include <span>
#include <vector>

#include "kasnerlab/field.hpp"

namespace kasnerlab {

// Kasner exponents q_1..q_D with sum q = 1 and sum q^2 = 1.
class KasnerExponents {
 public:
  static constexpr double kConstraintTolerance = 1e-12;

  // Validates both Kasner relations to kConstraintTolerance; throws DomainError.
  explicit KasnerExponents(std::vector<double> q);

  int dim() const { return static_cast<int>(q_.size()); }
  std::span<const double> q() const { return q_; }
  double operator[](int i) const { return q_[static_cast<std::size_t>(i)]; }
  double max_abs() const;

 private:
  std::vector<double> q_;
};

enum class QuadraticRoot { plus, minus };

// The 15/21/2 split: fifteen exponents -1/6 + eps, twenty-one 1/6 - eps, a pair
// (q37, q38) with q37 + q38 = 6 eps and q37^2 + q38^2 = 12 eps - 36 eps^2, and
// zeros for the remaining directions. Throws DomainError for dim < 38, for a
// negative discriminant, or when the result is not moderately anisotropic.
KasnerExponents construct_exponents(int dim, double eps, QuadraticRoot root = QuadraticRoot::plus);

// The D = 36 family (fifteen -1/6, twenty-one +1/6) that sits exactly on the
// moderate-anisotropy boundary.
KasnerExponents borderline_exponents_36();

struct ExponentReport {
  double sum = 0.0;
  double sum_sq = 0.0;
  double max_abs = 0.0;
  bool moderate = false;  // max_abs < 1/6
  bool dhs_ok = false;    // dhs_margin > 0
  double dhs_margin = 0.0;
};

// Sums, moderate-anisotropy flag, and the minimum over all triples i, {j, k}
// (pairwise distinct) of 2 q_i + sum_{l not in {i,j,k}} q_l, by enumeration.
// Throws DomainError for fewer than three exponents.
ExponentReport validate_exponents(std::span<const double> q);
inline ExponentReport validate_exponents(const KasnerExponents& q) { return validate_exponents(q.q()); }

// C such that the Kasner Kretschmann scalar equals C t^{-4}:
// C = 4 { sum_i (q_i^2 - q_i)^2 + sum_{i<j} q_i^2 q_j^2 }.
template <typename Scalar>
Scalar kretschmann_constant(std::span<const Scalar> q) {
  Scalar diag(0);
  Scalar cross(0);
  const std::size_t d = q.size();
  for (std::size_t i = 0; i < d; ++i) {
    const Scalar a = q[i] * q[i] - q[i];
    diag += a * a;
    for (std::size_t j = i + 1; j < d; ++j) cross += q[i] * q[i] * q[j] * q[j];
  }
  return Scalar(4) * (diag + cross);
}

// Accumulates in extended precision so the D = 36 value is exact to ~1e-16.
inline double kretschmann_constant(const KasnerExponents& q) {
  const std::vector<long double> wide(q.q().begin(), q.q().end());
  return static_cast<double>(kretschmann_constant<long double>(std::span<const long double>(wide)));
}

// Exact Kasner slice at time t: g = diag(t^{2q}), g^{-1} = diag(t^{-2q}),
// K = -diag(q)/t, n = 1. Throws DomainError for t <= 0 or a dimension mismatch.
SolutionState kasner_state(const KasnerExponents& q, double t, const GridSpec& grid);

}  // namespace kasnerlab
