#include "kasnerlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kasnerlab/differentiation.hpp"
#include "kasnerlab/tensor_algebra.hpp"

namespace kasnerlab {

namespace {

void check_order(int order) {
  if (order < 0 || order > kMaxDerivativeOrder)
    throw ConfigError("Sobolev order must lie in 0.." + std::to_string(kMaxDerivativeOrder));
}

// Pointwise squared |.|, either frame or g.
Eigen::VectorXd pointwise_sq(const Field& t, const Field* g, const Field* ginv) {
  Eigen::VectorXd out(t.num_points());
  for (int p = 0; p < t.num_points(); ++p) {
    if (g == nullptr) {
      out(p) = t.at(p).squaredNorm();
    } else {
      const Eigen::VectorXd col = t.at(p);
      out(p) = std::max(0.0, g_inner<double>(col, col, t.valence(), g->matrix(p), ginv->matrix(p)));
    }
  }
  return out;
}

// Pointwise squared gradient norm: frame sums |d_a T|^2 over active a, the
// g-version contracts the extra index with g^{ab}.
Eigen::VectorXd gradient_sq(const Field& t, const Field* g, const Field* ginv) {
  const GridSpec& grid = t.grid();
  const int np = grid.num_active();
  std::vector<Field> d;
  d.reserve(static_cast<std::size_t>(np));
  for (int a = 0; a < np; ++a) d.push_back(derivative(t, grid.active[static_cast<std::size_t>(a)], 1));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(t.num_points());
  for (int p = 0; p < t.num_points(); ++p) {
    double acc = 0.0;
    for (int a = 0; a < np; ++a) {
      const Eigen::VectorXd da = d[static_cast<std::size_t>(a)].at(p);
      if (g == nullptr) {
        acc += da.squaredNorm();
        continue;
      }
      const auto gm = g->matrix(p);
      const auto gi = ginv->matrix(p);
      for (int b = 0; b < np; ++b) {
        const double w = gi(grid.active[static_cast<std::size_t>(a)], grid.active[static_cast<std::size_t>(b)]);
        if (w == 0.0) continue;
        const Eigen::VectorXd db = d[static_cast<std::size_t>(b)].at(p);
        acc += w * g_inner<double>(da, db, t.valence(), gm, gi);
      }
    }
    out(p) = std::max(0.0, acc);
  }
  return out;
}

double sobolev_impl(const Field& t, int order, SobolevKind kind, const Field* g, const Field* ginv, bool gradient) {
  check_order(order + (gradient ? 1 : 0));
  const int np = t.grid().num_active();
  const int lo = kind == SobolevKind::full ? 0 : order;
  double total = 0.0;
  for (int k = lo; k <= order; ++k) {
    for (const auto& alpha : multi_indices(np, k)) {
      const Field dt = partial(t, alpha);
      const Eigen::VectorXd sq = gradient ? gradient_sq(dt, g, ginv) : pointwise_sq(dt, g, ginv);
      total += sq.mean();
    }
  }
  return std::sqrt(total);
}

Field scalar_from(const GridSpec& grid, const Eigen::VectorXd& v) {
  Field out(grid, kScalar);
  out.data().row(0) = v.transpose();
  return out;
}

}  // namespace

Field frame_norm(const Field& t) { return scalar_from(t.grid(), pointwise_sq(t, nullptr, nullptr).cwiseSqrt()); }

Field g_norm(const Field& t, const Field& g, const Field& ginv) {
  return scalar_from(t.grid(), pointwise_sq(t, &g, &ginv).cwiseSqrt());
}

Field gradient_g_norm(const Field& t, const Field& g, const Field& ginv) {
  return scalar_from(t.grid(), gradient_sq(t, &g, &ginv).cwiseSqrt());
}

Field gradient_frame_norm(const Field& t) {
  return scalar_from(t.grid(), gradient_sq(t, nullptr, nullptr).cwiseSqrt());
}

double l2_norm(const Field& scalar) { return std::sqrt(scalar.data().row(0).squaredNorm() / scalar.num_points()); }

double sup_norm(const Field& scalar) { return scalar.data().cwiseAbs().maxCoeff(); }

double min_value(const Field& scalar) { return scalar.data().row(0).minCoeff(); }

double max_value(const Field& scalar) { return scalar.data().row(0).maxCoeff(); }

double sobolev_norm(const Field& t, int order, SobolevKind kind) {
  return sobolev_impl(t, order, kind, nullptr, nullptr, false);
}

double sobolev_norm(const Field& t, int order, SobolevKind kind, const Field& g, const Field& ginv) {
  return sobolev_impl(t, order, kind, &g, &ginv, false);
}

double gradient_sobolev_norm(const Field& t, int order, SobolevKind kind) {
  return sobolev_impl(t, order, kind, nullptr, nullptr, true);
}

double gradient_sobolev_norm(const Field& t, int order, SobolevKind kind, const Field& g, const Field& ginv) {
  return sobolev_impl(t, order, kind, &g, &ginv, true);
}

double w_inf_norm(const Field& t, int order) {
  check_order(order);
  double total = 0.0;
  for (int k = 0; k <= order; ++k)
    for (const auto& alpha : multi_indices(t.grid().num_active(), k)) {
      const Field dt = partial(t, alpha);
      double m = 0.0;
      for (int p = 0; p < dt.num_points(); ++p) m = std::max(m, dt.at(p).norm());
      total += m;
    }
  return total;
}

}  // namespace kasnerlab
