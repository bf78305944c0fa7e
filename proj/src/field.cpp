#include "kasnerlab/field.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <limits>
#include <string>

namespace kasnerlab {

Field invert_metric(const Field& g) {
  if (g.valence() != kCovariant2) throw InvalidStateError("metric must be a (0,2) field");
  const int d = g.dim();
  Field ginv(g.grid(), kContravariant2, true);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  for (int p = 0; p < g.num_points(); ++p) {
    Eigen::MatrixXd m = g.matrix(p);
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
      throw InvalidStateError("metric is not positive definite at grid point " + std::to_string(p));
    Eigen::MatrixXd inv = llt.solve(id);
    ginv.matrix(p) = 0.5 * (inv + inv.transpose());
  }
  return ginv;
}

double min_metric_eigenvalue(const Field& g) {
  double lo = std::numeric_limits<double>::infinity();
  for (int p = 0; p < g.num_points(); ++p) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(g.matrix(p)), Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
  }
  return lo;
}

void SolutionState::validate(double inverse_tol) const {
  if (!(t > 0.0)) throw InvalidStateError("t must be positive");
  if (g.valence() != kCovariant2 || ginv.valence() != kContravariant2 || K.valence() != kMixed ||
      n.valence() != kScalar)
    throw InvalidStateError("solution fields have the wrong valence");
  const int d = g.dim();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  for (int p = 0; p < g.num_points(); ++p) {
    Eigen::MatrixXd m = g.matrix(p);
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
      throw InvalidStateError("metric is not positive definite at grid point " + std::to_string(p));
    const double err = (Eigen::MatrixXd(ginv.matrix(p)) * m - id).cwiseAbs().maxCoeff();
    if (err > inverse_tol)
      throw InvalidStateError("inverse metric mismatch " + std::to_string(err) + " at grid point " + std::to_string(p));
    if (!(n.value(p) > 0.0)) throw InvalidStateError("lapse is not positive at grid point " + std::to_string(p));
  }
}

}  // namespace kasnerlab
