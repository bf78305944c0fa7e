#include "kasnerlab/vtd.hpp"

#include <cmath>
#include <numbers>

#include "kasnerlab/geometry.hpp"

namespace kasnerlab {

VtdProfile VtdProfile::constant(const GridSpec& grid, const KasnerExponents& q) {
  if (q.dim() != grid.dim) throw DomainError("exponent count does not match the grid dimension");
  return VtdProfile{grid, std::vector<KasnerExponents>(static_cast<std::size_t>(grid.num_points()), q)};
}

VtdProfile VtdProfile::from_eps(const GridSpec& grid, const std::function<double(std::span<const double>)>& eps,
                                QuadraticRoot root) {
  return from_function(grid, [&](std::span<const double> x) {
    const KasnerExponents q = construct_exponents(grid.dim, eps(x), root);
    return std::vector<double>(q.q().begin(), q.q().end());
  });
}

VtdProfile VtdProfile::from_function(const GridSpec& grid,
                                     const std::function<std::vector<double>(std::span<const double>)>& q) {
  grid.validate();
  VtdProfile out;
  out.grid = grid;
  for (int p = 0; p < grid.num_points(); ++p) {
    const std::vector<double> x = grid.position(p);
    KasnerExponents e(q(x));
    if (e.dim() != grid.dim) throw DomainError("exponent count does not match the grid dimension");
    out.q_field.push_back(std::move(e));
  }
  return out;
}

bool VtdProfile::spatially_constant() const {
  for (const auto& q : q_field)
    for (int i = 0; i < q.dim(); ++i)
      if (q[i] != q_field.front()[i]) return false;
  return true;
}

KasnerExponents kasner_circle(double theta) {
  std::vector<double> q(3);
  for (int i = 0; i < 3; ++i)
    q[static_cast<std::size_t>(i)] = 1.0 / 3.0 + 2.0 / 3.0 * std::cos(theta + 2.0 * std::numbers::pi * i / 3.0);
  return KasnerExponents(std::move(q));
}

Field vtd_metric(const VtdProfile& profile, double t) {
  if (!(t > 0.0)) throw DomainError("VTD metric needs t > 0");
  Field g(profile.grid, kCovariant2, true);
  const double lt = std::log(t);
  for (int p = 0; p < g.num_points(); ++p) {
    auto m = g.matrix(p);
    const KasnerExponents& q = profile.q_field[static_cast<std::size_t>(p)];
    for (int i = 0; i < q.dim(); ++i) m(i, i) = std::exp(2.0 * q[i] * lt);
  }
  return g;
}

std::vector<double> log_spaced_times(double t_hi, double t_lo, int n) {
  if (n < 2 || !(t_hi > t_lo) || !(t_lo > 0.0)) throw ConfigError("log-spaced times need n >= 2 and t_hi > t_lo > 0");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double a = std::log(t_hi);
  const double b = std::log(t_lo);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  return out;
}

RicciDecay ricci_decay_check(const VtdProfile& profile, std::span<const double> t_list) {
  if (t_list.size() < 3) throw ConfigError("Ricci decay fit needs at least three times");
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    if (!(t_list[i] > 0.0)) throw ConfigError("times must be positive");
    if (i > 0 && !(t_list[i] < t_list[i - 1])) throw ConfigError("times must be strictly decreasing");
  }
  RicciDecay out;
  for (double t : t_list) {
    const Field g = vtd_metric(profile, t);
    const Field ginv = invert_metric(g);
    const Field ric = ricci_mixed(g, ginv);
    out.t.push_back(t);
    out.sup_t2_ricci.push_back(t * t * ric.data().cwiseAbs().maxCoeff());
  }
  out.strictly_decreasing = true;
  for (std::size_t i = 1; i < out.sup_t2_ricci.size(); ++i)
    if (!(out.sup_t2_ricci[i] < out.sup_t2_ricci[i - 1])) out.strictly_decreasing = false;
  bool positive = true;
  for (double v : out.sup_t2_ricci)
    if (!(v > 0.0)) positive = false;
  if (positive) {
    const std::size_t m = out.t.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double x = std::log(out.t[i]);
      const double y = std::log(out.sup_t2_ricci[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    out.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return out;
}

}  // namespace kasnerlab
