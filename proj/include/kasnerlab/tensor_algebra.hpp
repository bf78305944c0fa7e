#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "kasnerlab/field.hpp"

namespace kasnerlab {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Applies `m` to index `slot` of a rank-`rank` tensor with flattened
// row-major components: out[..i..] = sum_a m(i, a) in[..a..].
template <typename Scalar, typename MatrixType>
DenseVector<Scalar> contract_index(const Eigen::Ref<const DenseVector<Scalar>>& in, int dim, int rank,
                                   int slot, const MatrixType& m) {
  const int left = ipow(dim, slot);
  const int right = ipow(dim, rank - slot - 1);
  DenseVector<Scalar> out(in.size());
  for (int l = 0; l < left; ++l) {
    const Eigen::Index offset = static_cast<Eigen::Index>(l) * dim * right;
    Eigen::Map<const RowMatrix<Scalar>> block(in.data() + offset, dim, right);
    Eigen::Map<RowMatrix<Scalar>> dst(out.data() + offset, dim, right);
    dst.noalias() = m * block;
  }
  return out;
}

// Lowers every upper index with g and raises every lower index with g^{-1}.
template <typename Scalar, typename MetricType, typename InverseType>
DenseVector<Scalar> flip_indices(const Eigen::Ref<const DenseVector<Scalar>>& t, Valence valence,
                                 const MetricType& g, const InverseType& ginv) {
  const int dim = static_cast<int>(g.rows());
  DenseVector<Scalar> out = t;
  for (int slot = 0; slot < valence.rank(); ++slot) {
    if (slot < valence.upper)
      out = contract_index<Scalar>(out, dim, valence.rank(), slot, g);
    else
      out = contract_index<Scalar>(out, dim, valence.rank(), slot, ginv);
  }
  return out;
}

// g-inner product of two tensors of the same valence at a point.
template <typename Scalar, typename MetricType, typename InverseType>
Scalar g_inner(const Eigen::Ref<const DenseVector<Scalar>>& a, const Eigen::Ref<const DenseVector<Scalar>>& b,
               Valence valence, const MetricType& g, const InverseType& ginv) {
  const int dim = static_cast<int>(g.rows());
  if (valence.rank() == 0) return a(0) * b(0);
  if (valence.rank() == 1) {
    if (valence.upper == 1) return a.dot(g * b);
    return a.dot(ginv * b);
  }
  if (valence.rank() == 2) {
    Eigen::Map<const RowMatrix<Scalar>> am(a.data(), dim, dim);
    Eigen::Map<const RowMatrix<Scalar>> bm(b.data(), dim, dim);
    RowMatrix<Scalar> flipped;
    if (valence.upper == 0)
      flipped = ginv * am * ginv;
    else if (valence.upper == 1)
      flipped = g * am * ginv;
    else
      flipped = g * am * g;
    return flipped.cwiseProduct(bm).sum();
  }
  return flip_indices<Scalar>(a, valence, g, ginv).dot(b);
}

// |T|_g = sqrt(<T, T>_g); clamps tiny negative roundoff to zero.
template <typename Scalar, typename MetricType, typename InverseType>
Scalar g_norm_at(const Eigen::Ref<const DenseVector<Scalar>>& t, Valence valence, const MetricType& g,
                 const InverseType& ginv) {
  using std::sqrt;
  const Scalar sq = g_inner<Scalar>(t, t, valence, g, ginv);
  return sq > Scalar(0) ? sqrt(sq) : Scalar(0);
}

// |T|_Frame: Euclidean norm of the coordinate components.
template <typename Derived>
typename Derived::Scalar frame_norm_at(const Eigen::MatrixBase<Derived>& t) {
  return t.norm();
}

}  // namespace kasnerlab
