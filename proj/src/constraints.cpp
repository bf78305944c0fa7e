#include "kasnerlab/constraints.hpp"

#include <algorithm>

#include "kasnerlab/differentiation.hpp"
#include "kasnerlab/norms.hpp"
#include "kasnerlab/tensor_algebra.hpp"

namespace kasnerlab {

double ConstraintResiduals::scaled_max(double t) const {
  return std::max({t * t * hamiltonian_sup, t * momentum_sup, t * cmc_sup});
}

Field hamiltonian_residual(const SolutionState& s, const GeometryCache& geometry) {
  Field h(s.g.grid(), kScalar);
  const double inv_t2 = 1.0 / (s.t * s.t);
  for (int p = 0; p < h.num_points(); ++p) {
    const auto k = s.K.matrix(p);
    h(p, 0) = geometry.scalar_curv.value(p) - k.cwiseProduct(k.transpose()).sum() + inv_t2;
  }
  return h;
}

Field hamiltonian_residual(const SolutionState& s) { return hamiltonian_residual(s, compute_geometry(s.g, s.ginv)); }

Field momentum_residual(const SolutionState& s, const GeometryCache& geometry) {
  const GridSpec& grid = s.g.grid();
  const int d = grid.dim;
  Field m(grid, kCovector);
  for (int a = 0; a < grid.num_active(); ++a) {
    const int dir = grid.active[static_cast<std::size_t>(a)];
    const Field dk = derivative(s.K, dir, 1);
    for (int p = 0; p < grid.num_points(); ++p) m.at(p) += dk.matrix(p).row(dir).transpose();
  }
  const Eigen::Index d2 = static_cast<Eigen::Index>(d) * d;
  for (int p = 0; p < grid.num_points(); ++p) {
    const double* gm = geometry.gamma_mixed.at(p).data();
    if (geometry.gamma_mixed.at(p).isZero(0)) continue;
    const auto k = s.K.matrix(p);
    Eigen::VectorXd trace = Eigen::VectorXd::Zero(d);  // Gamma^a_{ab}
    for (int a = 0; a < d; ++a) trace += Eigen::Map<const RowMatrix<double>>(gm + a * d2, d, d).row(a).transpose();
    Eigen::VectorXd corr = k.transpose() * trace;
    for (int b = 0; b < d; ++b) {
      // sum_a Gamma^b_{ai} K^a_b
      Eigen::Map<const RowMatrix<double>> gb(gm + b * d2, d, d);
      corr -= gb.transpose() * k.col(b);
    }
    m.at(p) += corr;
  }
  return m;
}

Field momentum_residual(const SolutionState& s) { return momentum_residual(s, christoffel(s.g, s.ginv)); }

Field cmc_residual(const SolutionState& s) {
  Field c(s.g.grid(), kScalar);
  for (int p = 0; p < c.num_points(); ++p) c(p, 0) = s.K.matrix(p).trace() + 1.0 / s.t;
  return c;
}

ConstraintResiduals constraint_residuals(const SolutionState& s, const GeometryCache& geometry) {
  ConstraintResiduals r;
  r.hamiltonian = hamiltonian_residual(s, geometry);
  r.momentum = momentum_residual(s, geometry);
  r.cmc_trace = cmc_residual(s);
  r.hamiltonian_sup = sup_norm(r.hamiltonian);
  r.momentum_sup = sup_norm(frame_norm(r.momentum));
  r.cmc_sup = sup_norm(r.cmc_trace);
  return r;
}

ConstraintResiduals constraint_residuals(const SolutionState& s) {
  return constraint_residuals(s, compute_geometry(s.g, s.ginv));
}

}  // namespace kasnerlab
