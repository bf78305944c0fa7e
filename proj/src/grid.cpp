#include "kasnerlab/grid.hpp"

#include <algorithm>

#include "kasnerlab/errors.hpp"

namespace kasnerlab {

std::string to_string(DerivativeScheme scheme) {
  return scheme == DerivativeScheme::spectral ? "spectral" : "fd4";
}

DerivativeScheme parse_scheme(const std::string& name) {
  if (name == "spectral") return DerivativeScheme::spectral;
  if (name == "fd4") return DerivativeScheme::fd4;
  throw ConfigError("unknown derivative scheme '" + name + "' (expected spectral or fd4)");
}

void GridSpec::validate() const {
  if (dim < 1) throw ConfigError("grid dimension must be positive");
  if (num_active() > kMaxActive) throw ConfigError("at most 3 active directions are supported");
  if (active.size() != points.size()) throw ConfigError("grid needs one point count per active direction");
  for (std::size_t a = 0; a < active.size(); ++a) {
    if (active[a] < 0 || active[a] >= dim) throw ConfigError("active direction out of range");
    for (std::size_t b = 0; b < a; ++b)
      if (active[a] == active[b]) throw ConfigError("active directions must be distinct");
    if (points[a] < kMinPoints) throw ConfigError("each active direction needs at least 8 points");
    if (points[a] % 2 != 0) throw ConfigError("point counts must be even");
  }
}

int GridSpec::num_points() const {
  int n = 1;
  for (int p : points) n *= p;
  return n;
}

int GridSpec::axis_of(int direction) const {
  auto it = std::find(active.begin(), active.end(), direction);
  return it == active.end() ? -1 : static_cast<int>(it - active.begin());
}

int GridSpec::stride(int axis) const {
  int s = 1;
  for (int a = num_active() - 1; a > axis; --a) s *= points[static_cast<std::size_t>(a)];
  return s;
}

int GridSpec::shifted(int point, int axis, int shift) const {
  const int n = points[static_cast<std::size_t>(axis)];
  const int s = stride(axis);
  const int i = (point / s) % n;
  int j = (i + shift) % n;
  if (j < 0) j += n;
  return point + (j - i) * s;
}

double GridSpec::coordinate(int point, int axis) const {
  return static_cast<double>(index_along(point, axis)) / points[static_cast<std::size_t>(axis)];
}

std::vector<double> GridSpec::position(int point) const {
  std::vector<double> x(static_cast<std::size_t>(dim), 0.0);
  for (int a = 0; a < num_active(); ++a) x[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])] = coordinate(point, a);
  return x;
}

GridSpec line_grid(int dim, int direction, int points, DerivativeScheme scheme) {
  GridSpec g;
  g.dim = dim;
  g.active = {direction};
  g.points = {points};
  g.scheme = scheme;
  g.validate();
  return g;
}

}  // namespace kasnerlab
