#include "kasnerlab/geometry.hpp"

#include <cmath>
#include <string>

#include "kasnerlab/differentiation.hpp"
#include "kasnerlab/geometry_kernels.hpp"
#include "kasnerlab/tensor_algebra.hpp"

namespace kasnerlab {

namespace {

using Jet = kernels::MetricJet<double>;

Jet metric_jet_at(const GridSpec& grid, const Field& ginv, const FieldJet& jet, int p) {
  Jet j;
  j.ginv = ginv.matrix(p);
  j.active = grid.active;
  const int np = jet.num_active();
  j.dg.reserve(static_cast<std::size_t>(np));
  for (int a = 0; a < np; ++a) j.dg.emplace_back(jet.first[static_cast<std::size_t>(a)].matrix(p));
  if (jet.second.empty()) return j;
  j.ddg.reserve(static_cast<std::size_t>(np * np));
  for (int a = 0; a < np; ++a)
    for (int b = 0; b < np; ++b) j.ddg.emplace_back(jet.dd(a, b).matrix(p));
  return j;
}

bool flat_at(const FieldJet& jet, int p) {
  for (const auto& f : jet.first)
    if (!f.at(p).isZero(0)) return false;
  for (const auto& f : jet.second)
    if (!f.at(p).isZero(0)) return false;
  return true;
}

}  // namespace

FieldJet field_jet(const Field& f, bool with_second) {
  const GridSpec& grid = f.grid();
  const int np = grid.num_active();
  FieldJet jet;
  for (int a = 0; a < np; ++a) jet.first.push_back(derivative(f, grid.active[static_cast<std::size_t>(a)], 1));
  if (with_second) {
    for (int a = 0; a < np; ++a)
      for (int b = 0; b < np; ++b) {
        if (a == b)
          jet.second.push_back(derivative(f, grid.active[static_cast<std::size_t>(a)], 2));
        else if (b < a)
          jet.second.push_back(jet.second[static_cast<std::size_t>(b * np + a)]);
        else
          jet.second.push_back(derivative(jet.first[static_cast<std::size_t>(a)], grid.active[static_cast<std::size_t>(b)], 1));
      }
  }
  return jet;
}

GeometryCache christoffel(const Field& g, const Field& ginv) {
  const GridSpec& grid = g.grid();
  const FieldJet jet = field_jet(g, false);
  GeometryCache c;
  c.gamma_lower = Field(grid, Valence{0, 3});
  c.gamma_mixed = Field(grid, Valence{1, 2});
  for (int p = 0; p < grid.num_points(); ++p) {
    if (flat_at(jet, p)) continue;
    const Jet j = metric_jet_at(grid, ginv, jet, p);
    kernels::christoffel_at(j, c.gamma_lower.at(p).data(), c.gamma_mixed.at(p).data());
  }
  return c;
}

GeometryCache compute_geometry(const Field& g, const Field& ginv, bool with_riemann) {
  return compute_geometry(g, ginv, field_jet(g, true), with_riemann);
}

GeometryCache compute_geometry(const Field& g, const Field& ginv, const FieldJet& jet, bool with_riemann) {
  const GridSpec& grid = g.grid();
  GeometryCache c;
  c.gamma_lower = Field(grid, Valence{0, 3});
  c.gamma_mixed = Field(grid, Valence{1, 2});
  c.ricci_mixed = Field(grid, kMixed);
  c.scalar_curv = Field(grid, kScalar);
  if (with_riemann) c.riemann = Field(grid, Valence{0, 4});
  for (int p = 0; p < grid.num_points(); ++p) {
    if (flat_at(jet, p)) continue;
    const Jet j = metric_jet_at(grid, ginv, jet, p);
    double* gl = c.gamma_lower.at(p).data();
    double* gm = c.gamma_mixed.at(p).data();
    kernels::christoffel_at(j, gl, gm);
    const RowMatrix<double> ric = kernels::ricci_at(j, static_cast<const double*>(gl), static_cast<const double*>(gm));
    c.ricci_mixed.matrix(p) = ric;
    c.scalar_curv(p, 0) = ric.trace();
    if (with_riemann) kernels::riemann_at(j, static_cast<const double*>(gl), static_cast<const double*>(gm), c.riemann->at(p).data());
  }
  return c;
}

Field ricci_mixed(const Field& g, const Field& ginv) { return compute_geometry(g, ginv).ricci_mixed; }

Field scalar_curvature(const Field& ricci) {
  Field sc(ricci.grid(), kScalar);
  for (int p = 0; p < ricci.num_points(); ++p) sc(p, 0) = ricci.matrix(p).trace();
  return sc;
}

Field riemann(const Field& g, const Field& ginv) { return *compute_geometry(g, ginv, true).riemann; }

Field contracted_christoffel(const Field& ginv, const FieldJet& metric_jet) {
  const GridSpec& grid = ginv.grid();
  const int d = grid.dim;
  const int np = grid.num_active();
  Field out(grid, Valence{1, 0});
  for (int p = 0; p < grid.num_points(); ++p) {
    const auto gi = ginv.matrix(p);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
    bool any = false;
    for (int a = 0; a < np; ++a) {
      const auto dg = metric_jet.first[static_cast<std::size_t>(a)].matrix(p);
      if (dg.isZero(0)) continue;
      any = true;
      const int dir = grid.active[static_cast<std::size_t>(a)];
      // g^{ab} d_a g_{db}
      v += dg * gi.row(dir).transpose();
      // -(1/2) g^{ab} d_d g_{ab}
      v(dir) -= 0.5 * gi.cwiseProduct(dg).sum();
    }
    if (any) out.at(p) = gi * v;
  }
  return out;
}

CurvatureBlocks curvature_blocks(const SolutionState& state, const Field& dt_tk, bool keep_spatial_block) {
  const GridSpec& grid = state.g.grid();
  const int d = grid.dim;
  const int np = grid.num_active();
  const double t = state.t;
  for (int p = 0; p < grid.num_points(); ++p)
    if (!(state.n.value(p) > 0.0))
      throw InvalidStateError("lapse is not positive at grid point " + std::to_string(p));

  const FieldJet gjet = field_jet(state.g, true);
  const GeometryCache geo = compute_geometry(state.g, state.ginv, gjet, false);
  const FieldJet njet = field_jet(state.n, true);
  const FieldJet kjet = field_jet(state.K, false);

  CurvatureBlocks out;
  out.mixed_block = Field(grid, kMixed);
  out.zero_block = Field(grid, Valence{2, 1});
  out.kretschmann = Field(grid, kScalar);
  if (keep_spatial_block) out.spatial_block = Field(grid, Valence{2, 2});

  const Eigen::Index d2 = static_cast<Eigen::Index>(d) * d;
  RowMatrix<double> x(d2, d2);
  std::vector<double> riem_buf;

  for (int p = 0; p < grid.num_points(); ++p) {
    const double n = state.n.value(p);
    const RowMatrix<double> k = state.K.matrix(p);
    const RowMatrix<double> g = state.g.matrix(p);
    const RowMatrix<double> gi = state.ginv.matrix(p);
    const double* gm = geo.gamma_mixed.at(p).data();
    const bool flat = flat_at(gjet, p);

    // R_ab^cd as x((a,b),(c,d))
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          for (int e = 0; e < d; ++e)
            x(static_cast<Eigen::Index>(a) * d + b, static_cast<Eigen::Index>(c) * d + e) = k(c, a) * k(e, b) - k(e, a) * k(c, b);
    if (!flat) {
      riem_buf.assign(static_cast<std::size_t>(d2 * d2), 0.0);
      const Jet j = metric_jet_at(grid, state.ginv, gjet, p);
      kernels::riemann_at(j, geo.gamma_lower.at(p).data(), gm, riem_buf.data());
      // Riem_ab^cd = Riem_abef g^{ce} g^{df}
      for (Eigen::Index ab = 0; ab < d2; ++ab) {
        Eigen::Map<const RowMatrix<double>> r_ab(riem_buf.data() + ab * d2, d, d);
        const RowMatrix<double> raised = gi * r_ab * gi;
        x.row(ab) += Eigen::Map<const Eigen::RowVectorXd>(raised.data(), d2);
      }
    }
    double kr = x.cwiseProduct(x.transpose()).sum();
    if (keep_spatial_block) {
      // stored [c][d][a][b]
      Eigen::Map<RowMatrix<double>> dst(out.spatial_block->at(p).data(), d2, d2);
      dst = x.transpose();
    }

    // R_a0^c0 as m(c, a)
    RowMatrix<double> m = k / t + k * k;
    m += -(1.0 / (t * n)) * RowMatrix<double>(dt_tk.matrix(p)) + (1.0 / t) * (1.0 / n - 1.0) * k;
    if (np > 0) {
      RowMatrix<double> hess = RowMatrix<double>::Zero(d, d);
      Eigen::VectorXd dn = Eigen::VectorXd::Zero(d);
      for (int a = 0; a < np; ++a) {
        const int da = grid.active[static_cast<std::size_t>(a)];
        dn(da) = njet.first[static_cast<std::size_t>(a)].value(p);
        for (int b = 0; b < np; ++b) hess(da, grid.active[static_cast<std::size_t>(b)]) = njet.dd(a, b).value(p);
      }
      RowMatrix<double> gdn = RowMatrix<double>::Zero(d, d);  // sum_f d_f n Gamma^f_{ae}
      for (int f = 0; f < d; ++f)
        if (dn(f) != 0.0) gdn += dn(f) * Eigen::Map<const RowMatrix<double>>(gm + static_cast<std::ptrdiff_t>(f) * d2, d, d);
      m += (1.0 / n) * (gi * (gdn - hess));
    }
    out.mixed_block.matrix(p) = m;
    kr += 4.0 * m.cwiseProduct(m.transpose()).sum();

    // n^{-1} R_0b^cd = U(c,d,b) - U(d,c,b), U(c,d,b) = g^{ce} (nabla_e K)^d_b
    double* z = out.zero_block.at(p).data();
    std::vector<RowMatrix<double>> u(static_cast<std::size_t>(d), RowMatrix<double>::Zero(d, d));
    bool any = false;
    for (int e = 0; e < d; ++e) {
      RowMatrix<double> ne = RowMatrix<double>::Zero(d, d);
      const int axis = grid.axis_of(e);
      if (axis >= 0) ne = kjet.first[static_cast<std::size_t>(axis)].matrix(p);
      if (!flat) {
        RowMatrix<double> ge(d, d);  // ge(x, y) = Gamma^x_{ey}
        for (int xi = 0; xi < d; ++xi)
          for (int y = 0; y < d; ++y) ge(xi, y) = gm[(static_cast<std::ptrdiff_t>(xi) * d + e) * d + y];
        ne += ge * k - k * ge;
      }
      if (ne.isZero(0)) continue;
      any = true;
      for (int c = 0; c < d; ++c)
        if (gi(c, e) != 0.0) u[static_cast<std::size_t>(c)] += gi(c, e) * ne;
    }
    if (any) {
      for (int c = 0; c < d; ++c)
        for (int dd = 0; dd < d; ++dd)
          for (int b = 0; b < d; ++b)
            z[(static_cast<std::ptrdiff_t>(c) * d + dd) * d + b] = u[static_cast<std::size_t>(c)](dd, b) - u[static_cast<std::size_t>(dd)](c, b);
      const Eigen::VectorXd zc = out.zero_block.at(p);
      kr -= 4.0 * g_inner<double>(zc, zc, Valence{2, 1}, g, gi);
    }
    out.kretschmann(p, 0) = kr;
  }
  return out;
}

}  // namespace kasnerlab
