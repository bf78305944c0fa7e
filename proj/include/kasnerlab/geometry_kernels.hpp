#pragma once

// Pointwise curvature kernels for a metric whose coordinate derivatives are
// nonzero only along a few active directions. Every kernel takes
//   ginv          D x D inverse metric
//   active        the P active directions
//   dg[a]         d_{active[a]} g_{ij}
//   ddg[a*P + b]  d_{active[a]} d_{active[b]} g_{ij}
// and works on flattened row-major index arrays.

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "kasnerlab/tensor_algebra.hpp"

namespace kasnerlab::kernels {

template <typename Scalar>
struct MetricJet {
  DenseMatrix<Scalar> ginv;
  std::span<const int> active;
  std::vector<DenseMatrix<Scalar>> dg;
  std::vector<DenseMatrix<Scalar>> ddg;

  int dim() const { return static_cast<int>(ginv.rows()); }
  int num_active() const { return static_cast<int>(active.size()); }
  const DenseMatrix<Scalar>& second(int a, int b) const {
    return ddg[static_cast<std::size_t>(a * num_active() + b)];
  }
  bool flat_jet() const {
    for (const auto& m : dg)
      if (!m.isZero(0)) return false;
    for (const auto& m : ddg)
      if (!m.isZero(0)) return false;
    return true;
  }
};

// Gamma_{ijk} = (1/2)(d_i g_jk + d_k g_ij - d_j g_ik)  (middle index lowered), and
// Gamma^i_{jk} = (1/2) g^{ia}(d_j g_ak + d_k g_ja - d_a g_jk); both stored [i][j][k].
template <typename Scalar>
void christoffel_at(const MetricJet<Scalar>& jet, Scalar* gamma_lower, Scalar* gamma_mixed) {
  const int d = jet.dim();
  const int np = jet.num_active();
  const Scalar half(0.5);
  std::vector<DenseMatrix<Scalar>> raised(static_cast<std::size_t>(np));
  for (int a = 0; a < np; ++a) raised[static_cast<std::size_t>(a)] = jet.ginv * jet.dg[static_cast<std::size_t>(a)];

  for (int i = 0; i < d; ++i) {
    Eigen::Map<RowMatrix<Scalar>> lower(gamma_lower + static_cast<std::ptrdiff_t>(i) * d * d, d, d);
    Eigen::Map<RowMatrix<Scalar>> mixed(gamma_mixed + static_cast<std::ptrdiff_t>(i) * d * d, d, d);
    lower.setZero();
    mixed.setZero();
    for (int a = 0; a < np; ++a) {
      const int dir = jet.active[static_cast<std::size_t>(a)];
      const auto& da = jet.dg[static_cast<std::size_t>(a)];
      const auto& ra = raised[static_cast<std::size_t>(a)];
      // first kind
      if (dir == i) lower += half * da;
      lower.col(dir) += half * da.row(i).transpose();
      lower.row(dir) -= half * da.row(i);
      // second kind
      mixed -= half * jet.ginv(i, dir) * da;
      mixed.row(dir) += half * ra.row(i);
      mixed.col(dir) += half * ra.row(i).transpose();
    }
  }
}

// Ric^i_j = (1/2) g^{cd} g^{ie} {d_e d_c g_dj + d_c d_j g_ed - d_e d_j g_cd - d_c d_d g_ej}
//         + g^{ab} g^{cd} g^{ie} Gamma_{eac} Gamma_{jbd} - g^{ab} g^{cd} g^{ie} Gamma_{eaj} Gamma_{cbd}.
template <typename Scalar>
RowMatrix<Scalar> ricci_at(const MetricJet<Scalar>& jet, const Scalar* gamma_lower, const Scalar* gamma_mixed) {
  const int d = jet.dim();
  const int np = jet.num_active();
  const auto& ginv = jet.ginv;

  // Second-derivative brace contracted with g^{cd}; W(e, j).
  DenseMatrix<Scalar> w = DenseMatrix<Scalar>::Zero(d, d);
  for (int a = 0; a < np; ++a) {
    const int ea = jet.active[static_cast<std::size_t>(a)];
    for (int c = 0; c < np; ++c) {
      const int ca = jet.active[static_cast<std::size_t>(c)];
      w.row(ea) += ginv.row(ca) * jet.second(a, c);  // d_e d_c g_dj
      w.col(ea) += (ginv.row(ca) * jet.second(c, a)).transpose();  // d_c d_j g_ed (j = ea)
      const Scalar tr = ginv.cwiseProduct(jet.second(a, c)).sum();
      w(ea, ca) -= tr;  // d_e d_j g_cd
      w -= ginv(ea, ca) * jet.second(a, c);  // d_c d_d g_ej
    }
  }

  // T1(e, j) = sum_{b,c} Gamma^b_{ec} C_j(b, c), with C_j = Gamma_{j..} g^{-1}.
  const Eigen::Index d2 = static_cast<Eigen::Index>(d) * d;
  RowMatrix<Scalar> lhs(d, d2);
  RowMatrix<Scalar> rhs(d, d2);
  for (int b = 0; b < d; ++b)
    for (int e = 0; e < d; ++e)
      for (int c = 0; c < d; ++c)
        lhs(e, static_cast<Eigen::Index>(b) * d + c) = gamma_mixed[(static_cast<std::ptrdiff_t>(b) * d + e) * d + c];
  for (int j = 0; j < d; ++j) {
    Eigen::Map<const RowMatrix<Scalar>> first_j(gamma_lower + static_cast<std::ptrdiff_t>(j) * d2, d, d);
    RowMatrix<Scalar> cj = first_j * ginv;
    rhs.row(j) = Eigen::Map<const Eigen::Matrix<Scalar, 1, Eigen::Dynamic>>(cj.data(), d2);
  }
  DenseMatrix<Scalar> t1 = lhs * rhs.transpose();

  // T2(e, j) = sum_b Gamma^b_{ej} V_b with V_b = g^{cd} Gamma_{cbd}.
  DenseVector<Scalar> v = DenseVector<Scalar>::Zero(d);
  for (int c = 0; c < d; ++c) {
    Eigen::Map<const RowMatrix<Scalar>> first_c(gamma_lower + static_cast<std::ptrdiff_t>(c) * d2, d, d);
    v += first_c * ginv.row(c).transpose();
  }
  DenseMatrix<Scalar> t2 = DenseMatrix<Scalar>::Zero(d, d);
  for (int b = 0; b < d; ++b) {
    Eigen::Map<const RowMatrix<Scalar>> mixed_b(gamma_mixed + static_cast<std::ptrdiff_t>(b) * d2, d, d);
    t2 += v(b) * mixed_b;
  }

  return ginv * (Scalar(0.5) * w + t1 - t2);
}

// Riem_{ijkl} = (1/2){d_j d_k g_il + d_i d_l g_jk - d_i d_k g_jl - d_j d_l g_ik}
//             + g^{ab} Gamma_{ial} Gamma_{jbk} - g^{ab} Gamma_{iak} Gamma_{jbl}, stored [i][j][k][l].
template <typename Scalar>
void riemann_at(const MetricJet<Scalar>& jet, const Scalar* gamma_lower, const Scalar* gamma_mixed, Scalar* riem) {
  const int d = jet.dim();
  const int np = jet.num_active();
  const Eigen::Index d2 = static_cast<Eigen::Index>(d) * d;
  auto idx = [d](int i, int j, int k, int l) {
    return ((static_cast<std::ptrdiff_t>(i) * d + j) * d + k) * d + l;
  };

  // P((i,l),(j,k)) = sum_b Gamma^b_{il} Gamma_{jbk}
  RowMatrix<Scalar> x(d2, d);
  RowMatrix<Scalar> y(d, d2);
  for (int b = 0; b < d; ++b)
    for (int i = 0; i < d; ++i)
      for (int l = 0; l < d; ++l) x(static_cast<Eigen::Index>(i) * d + l, b) = gamma_mixed[(static_cast<std::ptrdiff_t>(b) * d + i) * d + l];
  for (int j = 0; j < d; ++j)
    for (int b = 0; b < d; ++b)
      for (int k = 0; k < d; ++k) y(b, static_cast<Eigen::Index>(j) * d + k) = gamma_lower[(static_cast<std::ptrdiff_t>(j) * d + b) * d + k];
  RowMatrix<Scalar> prod = x * y;

  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          riem[idx(i, j, k, l)] = prod(static_cast<Eigen::Index>(i) * d + l, static_cast<Eigen::Index>(j) * d + k) -
                                  prod(static_cast<Eigen::Index>(i) * d + k, static_cast<Eigen::Index>(j) * d + l);

  const Scalar half(0.5);
  for (int a = 0; a < np; ++a) {
    const int p = jet.active[static_cast<std::size_t>(a)];
    for (int b = 0; b < np; ++b) {
      const int q = jet.active[static_cast<std::size_t>(b)];
      const auto& h = jet.second(a, b);
      for (int u = 0; u < d; ++u)
        for (int v = 0; v < d; ++v) {
          const Scalar hv = half * h(u, v);
          riem[idx(u, p, q, v)] += hv;  // d_j d_k g_il with (j,k) = (p,q), (i,l) = (u,v)
          riem[idx(p, u, v, q)] += hv;  // d_i d_l g_jk with (i,l) = (p,q), (j,k) = (u,v)
          riem[idx(p, u, q, v)] -= hv;  // d_i d_k g_jl with (i,k) = (p,q), (j,l) = (u,v)
          riem[idx(u, p, v, q)] -= hv;  // d_j d_l g_ik with (j,l) = (p,q), (i,k) = (u,v)
        }
    }
  }
}

}  // namespace kasnerlab::kernels
