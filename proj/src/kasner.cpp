#include "kasnerlab/kasner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kasnerlab {

namespace {

struct Sums {
  double sum = 0.0;
  double sum_sq = 0.0;
};

Sums sums_of(std::span<const double> q) {
  Sums s;
  for (double v : q) {
    s.sum += v;
    s.sum_sq += v * v;
  }
  return s;
}

}  // namespace

KasnerExponents::KasnerExponents(std::vector<double> q) : q_(std::move(q)) {
  if (q_.empty()) throw DomainError("Kasner exponents need at least one entry");
  const Sums s = sums_of(q_);
  if (std::abs(s.sum - 1.0) > kConstraintTolerance || std::abs(s.sum_sq - 1.0) > kConstraintTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "Kasner relations violated: sum q = " << s.sum << ", sum q^2 = " << s.sum_sq;
    throw DomainError(msg.str());
  }
}

double KasnerExponents::max_abs() const {
  double m = 0.0;
  for (double v : q_) m = std::max(m, std::abs(v));
  return m;
}

KasnerExponents construct_exponents(int dim, double eps, QuadraticRoot root) {
  if (dim < 38)
    throw DomainError("no moderately anisotropic Kasner family: the construction needs dim >= 38 (got " +
                      std::to_string(dim) + ")");
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const double disc = 6.0 * eps - 27.0 * eps * eps;
  if (!(disc > 0.0)) throw DomainError("eps too large: 6 eps - 27 eps^2 must be positive");
  const double sixth = 1.0 / 6.0;
  std::vector<double> q(static_cast<std::size_t>(dim), 0.0);
  for (int i = 0; i < 15; ++i) q[static_cast<std::size_t>(i)] = -sixth + eps;
  for (int i = 15; i < 36; ++i) q[static_cast<std::size_t>(i)] = sixth - eps;
  const double r = std::sqrt(disc);
  q[36] = root == QuadraticRoot::plus ? 3.0 * eps + r : 3.0 * eps - r;
  q[37] = 6.0 * eps - q[36];
  double m = 0.0;
  for (double v : q) m = std::max(m, std::abs(v));
  if (!(m < sixth)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "eps too large: max |q| = " << m << " violates max |q| < 1/6";
    throw DomainError(msg.str());
  }
  return KasnerExponents(std::move(q));
}

KasnerExponents borderline_exponents_36() {
  std::vector<double> q(36);
  for (int i = 0; i < 15; ++i) q[static_cast<std::size_t>(i)] = -1.0 / 6.0;
  for (int i = 15; i < 36; ++i) q[static_cast<std::size_t>(i)] = 1.0 / 6.0;
  return KasnerExponents(std::move(q));
}

ExponentReport validate_exponents(std::span<const double> q) {
  const int d = static_cast<int>(q.size());
  if (d < 3) throw DomainError("the triple inequality needs at least three exponents");
  ExponentReport r;
  const Sums s = sums_of(q);
  r.sum = s.sum;
  r.sum_sq = s.sum_sq;
  for (double v : q) r.max_abs = std::max(r.max_abs, std::abs(v));
  r.moderate = r.max_abs < 1.0 / 6.0;
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      for (int k = j + 1; k < d; ++k) {
        if (k == i) continue;
        double v = 2.0 * q[static_cast<std::size_t>(i)];
        for (int l = 0; l < d; ++l)
          if (l != i && l != j && l != k) v += q[static_cast<std::size_t>(l)];
        margin = std::min(margin, v);
      }
    }
  r.dhs_margin = margin;
  r.dhs_ok = margin > 0.0;
  return r;
}

SolutionState kasner_state(const KasnerExponents& q, double t, const GridSpec& grid) {
  if (!(t > 0.0)) throw DomainError("Kasner slice needs t > 0");
  if (grid.dim != q.dim()) throw DomainError("grid dimension does not match the number of exponents");
  const int d = q.dim();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd gi = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    g(i, i) = std::pow(t, 2.0 * q[i]);
    gi(i, i) = std::pow(t, -2.0 * q[i]);
    k(i, i) = -q[i] / t;
  }
  auto flat = [](const Eigen::MatrixXd& m) { return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(m.data(), m.size())); };
  SolutionState s;
  s.t = t;
  s.g = Field::constant(grid, kCovariant2, flat(g), true);
  s.ginv = Field::constant(grid, kContravariant2, flat(gi), true);
  s.K = Field::constant(grid, kMixed, flat(k));
  s.n = Field::constant_scalar(grid, 1.0);
  return s;
}

}  // namespace kasnerlab
