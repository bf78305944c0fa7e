#pragma once

#include <optional>
#include <vector>

#include "kasnerlab/field.hpp"

namespace kasnerlab {

// Coordinate derivatives of a field along the active directions.
struct FieldJet {
  std::vector<Field> first;   // first[a] = d_{active[a]} f
  std::vector<Field> second;  // second[a*P + b] = d_{active[a]} d_{active[b]} f

  const Field& dd(int a, int b) const { return second[static_cast<std::size_t>(a * num_active() + b)]; }
  int num_active() const { return static_cast<int>(first.size()); }
};

FieldJet field_jet(const Field& f, bool with_second = true);

struct GeometryCache {
  Field gamma_lower;            // (0,3)  Gamma_{ijk} = g_{ja} Gamma^a_{ik}, stored [i][j][k]
  Field gamma_mixed;            // (1,2)  Gamma^i_{jk}, stored [i][j][k]
  Field ricci_mixed;            // (1,1)  Ric^i_j
  Field scalar_curv;            // Sc = Ric^a_a
  std::optional<Field> riemann; // (0,4)  Riem_{ijkl}
};

// Christoffel symbols only (ricci and scalar left empty).
GeometryCache christoffel(const Field& g, const Field& ginv);

// Christoffel symbols, Ricci (direct second-derivative formula) and scalar
// curvature; the (0,4) Riemann tensor when requested. Points where every
// metric derivative vanishes are flat and skip the kernels.
GeometryCache compute_geometry(const Field& g, const Field& ginv, bool with_riemann = false);
GeometryCache compute_geometry(const Field& g, const Field& ginv, const FieldJet& jet, bool with_riemann = false);

Field ricci_mixed(const Field& g, const Field& ginv);
Field scalar_curvature(const Field& ricci_mixed);
Field riemann(const Field& g, const Field& ginv);

// g^{ab} Gamma^c_{ab} for every c (a (1,0) field), used by the lapse operator.
Field contracted_christoffel(const Field& ginv, const FieldJet& metric_jet);

struct CurvatureBlocks {
  std::optional<Field> spatial_block;  // (2,2) R_ab^cd, stored [c][d][a][b]
  Field mixed_block;                   // R_a0^c0 as a (1,1) field, stored [c][a]
  Field zero_block;                    // n^{-1} R_0b^cd as a (2,1) field, stored [c][d][b]
  Field kretschmann;                   // scalar
};

// Spacetime curvature of (n, g, K) in CMC-transported coordinates via the
// Gauss-Codazzi blocks, and the Kretschmann scalar
//   R_ab^cd R_cd^ab + 4 R_a0^c0 R_c0^a0 - 4 |n^{-1} R_0.|_g^2.
// `dt_tk` is d_t(t K^i_j) supplied by the caller. Throws InvalidStateError if
// n <= 0 somewhere.
CurvatureBlocks curvature_blocks(const SolutionState& state, const Field& dt_tk, bool keep_spatial_block = false);

}  // namespace kasnerlab
