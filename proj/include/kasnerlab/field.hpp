#pragma once

#include <Eigen/Dense>

#include <cassert>
#include <utility>

#include "kasnerlab/errors.hpp"
#include "kasnerlab/grid.hpp"

namespace kasnerlab {

// Tensor type (l, m): l contravariant (upper) and m covariant (lower) indices.
struct Valence {
  int upper = 0;
  int lower = 0;

  int rank() const { return upper + lower; }
  bool operator==(const Valence&) const = default;
};

inline constexpr Valence kScalar{0, 0};
inline constexpr Valence kCovector{0, 1};
inline constexpr Valence kCovariant2{0, 2};
inline constexpr Valence kContravariant2{2, 0};
inline constexpr Valence kMixed{1, 1};

inline int ipow(int base, int exp) {
  int r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// A D-dimensional tensor field sampled on a GridSpec.
//
// Storage is an Eigen matrix with one column per grid point. Within a column
// the components are flattened row-major with upper indices first, then lower
// indices, each running over 0..D-1. For a (1,1) field T^i_j the component
// index is i*D + j, so `matrix(p)` returns the D x D matrix with row = upper
// index. A Christoffel field Gamma^i_{jk} is stored as i*D*D + j*D + k.
template <typename Scalar>
class TensorField {
 public:
  using Storage = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using RowMajorMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using MatrixMap = Eigen::Map<RowMajorMatrix>;
  using ConstMatrixMap = Eigen::Map<const RowMajorMatrix>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  TensorField() = default;

  TensorField(GridSpec grid, Valence valence, bool symmetric = false)
      : grid_(std::move(grid)), valence_(valence), symmetric_(symmetric) {
    if (valence_.upper < 0 || valence_.lower < 0 || valence_.rank() > 4)
      throw ConfigError("tensor valence must have rank at most 4");
    if (symmetric_ && valence_.rank() != 2)
      throw ConfigError("symmetric storage applies to rank-2 tensors only");
    data_ = Storage::Zero(component_count(grid_.dim, valence_), grid_.num_points());
  }

  // Spatially constant field with the given component vector at every point.
  static TensorField constant(const GridSpec& grid, Valence valence,
                              const Eigen::Ref<const Vector>& components, bool symmetric = false) {
    TensorField f(grid, valence, symmetric);
    assert(components.size() == f.num_components());
    f.data_.colwise() = components;
    return f;
  }

  static TensorField constant_scalar(const GridSpec& grid, Scalar value) {
    TensorField f(grid, kScalar);
    f.data_.setConstant(value);
    return f;
  }

  static int component_count(int dim, Valence valence) { return ipow(dim, valence.rank()); }

  const GridSpec& grid() const { return grid_; }
  Valence valence() const { return valence_; }
  int dim() const { return grid_.dim; }
  int num_components() const { return static_cast<int>(data_.rows()); }
  int num_points() const { return static_cast<int>(data_.cols()); }
  bool empty() const { return data_.size() == 0; }

  bool symmetric() const { return symmetric_; }
  // Flags the field symmetric and enforces T_ij = T_ji exactly by averaging.
  void make_symmetric() {
    if (valence_.rank() != 2) throw ConfigError("symmetric storage applies to rank-2 tensors only");
    symmetric_ = true;
    symmetrize();
  }
  void symmetrize() {
    if (!symmetric_) return;
    for (int p = 0; p < num_points(); ++p) {
      auto m = matrix(p);
      RowMajorMatrix avg = Scalar(0.5) * (m + m.transpose());
      m = avg;
    }
  }

  Storage& data() { return data_; }
  const Storage& data() const { return data_; }

  auto at(int point) { return data_.col(point); }
  auto at(int point) const { return data_.col(point); }

  Scalar& operator()(int point, int component) { return data_(component, point); }
  Scalar operator()(int point, int component) const { return data_(component, point); }

  MatrixMap matrix(int point) {
    assert(valence_.rank() == 2);
    return MatrixMap(data_.col(point).data(), grid_.dim, grid_.dim);
  }
  ConstMatrixMap matrix(int point) const {
    assert(valence_.rank() == 2);
    return ConstMatrixMap(data_.col(point).data(), grid_.dim, grid_.dim);
  }

  Scalar value(int point) const {
    assert(valence_.rank() == 0);
    return data_(0, point);
  }

  TensorField& operator+=(const TensorField& o) {
    data_ += o.data_;
    return *this;
  }
  TensorField& operator-=(const TensorField& o) {
    data_ -= o.data_;
    return *this;
  }
  TensorField& operator*=(Scalar s) {
    data_ *= s;
    return *this;
  }

  friend TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
  friend TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
  friend TensorField operator*(Scalar s, TensorField a) { return a *= s; }
  friend TensorField operator*(TensorField a, Scalar s) { return a *= s; }

 private:
  GridSpec grid_;
  Valence valence_{};
  bool symmetric_ = false;
  Storage data_;
};

using Field = TensorField<double>;

// One time slice (t, g, g^{-1}, K^i_j, n).
struct SolutionState {
  double t = 1.0;
  Field g;     // (0,2), symmetric
  Field ginv;  // (2,0), symmetric
  Field K;     // (1,1), mixed second fundamental form
  Field n;     // scalar lapse

  // Checks t > 0, g positive definite at every point, g^{-1} g = I to
  // `inverse_tol`, and n > 0. Throws InvalidStateError.
  void validate(double inverse_tol = 1e-10) const;
};

// Pointwise inverse of a symmetric positive-definite (0,2) field; the result
// is a symmetric (2,0) field. Throws InvalidStateError if g is not SPD.
Field invert_metric(const Field& g);

// Smallest eigenvalue of g over the grid.
double min_metric_eigenvalue(const Field& g);

}  // namespace kasnerlab
