#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "kasnerlab/field.hpp"

namespace kasnerlab {

inline constexpr int kMaxDerivativeOrder = 6;

// Circulant weights of the periodic derivative of the given order on n points
// of [0, 1): (D v)_j = sum_k w[k] v_{(j+k) mod n}. The spectral weights are the
// inverse DFT of (2 pi i kappa)^order, with the Nyquist mode dropped for odd
// orders (and every |kappa| > n/3 dropped when `dealias`). The fd4 weights
// compose fourth-order centered first- and second-derivative stencils.
// The returned reference stays valid for the lifetime of the calling thread.
const std::vector<double>& derivative_weights(int n, int order, DerivativeScheme scheme,
                                              bool dealias = false);

// Dense n x n circulant matrix built from derivative_weights.
Eigen::MatrixXd derivative_matrix(int n, int order, DerivativeScheme scheme, bool dealias = false);

// Eigenvalues of the circulant derivative matrix, indexed by DFT mode 0..n-1.
Eigen::VectorXcd derivative_symbol(int n, int order, DerivativeScheme scheme, bool dealias = false);

// Derivative of every component of `f` along a (0-based) direction. Applied
// in difference form sum_k w[k] (v_{j+k} - v_j), so constant data gives exact
// zeros. Inactive directions give the zero field.
template <typename Scalar>
TensorField<Scalar> derivative(const TensorField<Scalar>& f, int direction, int order = 1) {
  if (order < 0 || order > kMaxDerivativeOrder)
    throw ConfigError("derivative order must lie in 0.." + std::to_string(kMaxDerivativeOrder));
  const GridSpec& grid = f.grid();
  if (direction < 0 || direction >= grid.dim) throw ConfigError("derivative direction out of range");
  if (order == 0) return f;
  TensorField<Scalar> out(grid, f.valence(), f.symmetric());
  const int axis = grid.axis_of(direction);
  if (axis < 0) return out;
  const int n = grid.points[static_cast<std::size_t>(axis)];
  const auto& w = derivative_weights(n, order, grid.scheme, grid.dealias);
  const auto& in = f.data();
  auto& res = out.data();
  for (int p = 0; p < grid.num_points(); ++p) {
    for (int k = 1; k < n; ++k) {
      const double wk = w[static_cast<std::size_t>(k)];
      if (wk == 0.0) continue;
      res.col(p) += Scalar(wk) * (in.col(grid.shifted(p, axis, k)) - in.col(p));
    }
  }
  return out;
}

// Multi-index derivative: orders[axis] derivatives along grid.active[axis].
template <typename Scalar>
TensorField<Scalar> partial(const TensorField<Scalar>& f, std::span<const int> orders) {
  TensorField<Scalar> out = f;
  for (std::size_t axis = 0; axis < orders.size(); ++axis)
    if (orders[axis] > 0) out = derivative(out, f.grid().active[axis], orders[axis]);
  return out;
}

// All multi-indices over `num_axes` active axes with total order `order`
// (each unordered multi-index once).
std::vector<std::vector<int>> multi_indices(int num_axes, int order);

}  // namespace kasnerlab
