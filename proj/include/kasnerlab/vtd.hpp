#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kasnerlab/field.hpp"
#include "kasnerlab/kasner.hpp"

namespace kasnerlab {

// Kasner exponents that vary from grid point to grid point.
struct VtdProfile {
  GridSpec grid;
  std::vector<KasnerExponents> q_field;  // one entry per grid point

  static VtdProfile constant(const GridSpec& grid, const KasnerExponents& q);
  // construct_exponents(grid.dim, eps(x)) at every grid point x.
  static VtdProfile from_eps(const GridSpec& grid, const std::function<double(std::span<const double>)>& eps,
                             QuadraticRoot root = QuadraticRoot::plus);
  // Arbitrary exponents per point; each is validated.
  static VtdProfile from_function(const GridSpec& grid,
                                  const std::function<std::vector<double>(std::span<const double>)>& q);

  bool spatially_constant() const;
};

// Point on the three-dimensional Kasner circle:
// q_i = 1/3 + (2/3) cos(theta + 2 pi i / 3), i = 0, 1, 2.
KasnerExponents kasner_circle(double theta);

// Diagonal metric g_ii = t^{2 q_i(x)}.
Field vtd_metric(const VtdProfile& profile, double t);

struct RicciDecay {
  std::vector<double> t;
  std::vector<double> sup_t2_ricci;  // sup over points and components of |t^2 Ric^i_j|
  // Least-squares slope of log(sup) against log(t); empty when some sup is 0.
  std::optional<double> slope;
  bool strictly_decreasing = false;  // along the supplied (decreasing) t list
};

// Throws ConfigError for fewer than three times or a t list that is not
// strictly decreasing and positive.
RicciDecay ricci_decay_check(const VtdProfile& profile, std::span<const double> t_list);

// n log-spaced times from t_hi down to t_lo.
std::vector<double> log_spaced_times(double t_hi, double t_lo, int n);

}  // namespace kasnerlab
