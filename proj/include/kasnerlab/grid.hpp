#pragma once

#include <string>
#include <vector>

namespace kasnerlab {

enum class DerivativeScheme { spectral, fd4 };

std::string to_string(DerivativeScheme scheme);
DerivativeScheme parse_scheme(const std::string& name);

// Periodic grid on the unit torus T^D. Fields vary only along the `active`
// directions (0-based); every other direction is a symmetry direction.
// Grid points are ordered row-major over the active axes (last axis fastest).
struct GridSpec {
  int dim = 0;
  std::vector<int> active;
  std::vector<int> points;
  DerivativeScheme scheme = DerivativeScheme::spectral;
  bool dealias = false;  // 2/3-rule truncation of spectral derivatives

  static constexpr int kMaxActive = 3;
  static constexpr int kMinPoints = 8;

  // Throws ConfigError on any violated invariant.
  void validate() const;

  int num_active() const { return static_cast<int>(active.size()); }
  int num_points() const;
  // Index into `active` of a direction, or -1 if the direction is inactive.
  int axis_of(int direction) const;
  bool is_active(int direction) const { return axis_of(direction) >= 0; }

  int stride(int axis) const;
  int index_along(int point, int axis) const { return (point / stride(axis)) % points[axis]; }
  // Point reached by moving `shift` cells along `axis` (periodic).
  int shifted(int point, int axis, int shift) const;
  // Coordinate x^{active[axis]} of a grid point, in [0, 1).
  double coordinate(int point, int axis) const;
  // Full D-dimensional coordinate vector (inactive directions at 0).
  std::vector<double> position(int point) const;

  bool operator==(const GridSpec&) const = default;
};

// Grid with a single active direction: the usual shape for homogeneous runs.
GridSpec line_grid(int dim, int direction, int points,
                   DerivativeScheme scheme = DerivativeScheme::spectral);

}  // namespace kasnerlab
