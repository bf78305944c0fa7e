#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kasnerlab/field.hpp"
#include "kasnerlab/kasner.hpp"

namespace kasnerlab {

// Spacetime data at one event of -n^2 dt^2 + g_ab dx^a dx^b.
struct SpacetimeSample {
  double n = 1.0;
  double dt_n = 0.0;           // d_t n
  Eigen::VectorXd dn;          // d_a n
  Eigen::MatrixXd g;
  Eigen::MatrixXd ginv;
  Eigen::MatrixXd K;           // K^i_j, row = upper index
  std::vector<int> active;     // directions with nonzero metric derivatives
  std::vector<Eigen::MatrixXd> dg;  // dg[a] = d_{active[a]} g
};

class SpacetimeSampler {
 public:
  virtual ~SpacetimeSampler() = default;
  virtual int dim() const = 0;
  // Range of t on which samples are available.
  virtual double t_lower() const = 0;
  virtual double t_upper() const = 0;
  virtual SpacetimeSample sample(double t, std::span<const double> x) const = 0;
};

// The exact Kasner spacetime, evaluated in closed form.
class KasnerSampler : public SpacetimeSampler {
 public:
  explicit KasnerSampler(KasnerExponents q) : q_(std::move(q)) {}
  int dim() const override { return q_.dim(); }
  double t_lower() const override { return 0.0; }
  double t_upper() const override { return std::numeric_limits<double>::infinity(); }
  SpacetimeSample sample(double t, std::span<const double> x) const override;

 private:
  KasnerExponents q_;
};

// Stored simulation slices, interpolated linearly in tau = -ln t between
// slices and trigonometrically along the active directions. d_t n comes from
// differencing n between the two bracketing slices.
class SliceSampler : public SpacetimeSampler {
 public:
  // Slices in any order; at least two, all on the same grid.
  explicit SliceSampler(std::vector<SolutionState> slices);
  int dim() const override;
  double t_lower() const override;
  double t_upper() const override;
  SpacetimeSample sample(double t, std::span<const double> x) const override;

 private:
  struct Slice {
    double tau;
    Field g;
    Field K;
    Field n;
    std::vector<Field> dg;
    std::vector<Field> dn;
  };
  SpacetimeSample sample_slice(const Slice& s, const std::vector<double>& weights) const;
  std::vector<double> interpolation_weights(std::span<const double> x) const;

  GridSpec grid_;
  std::vector<Slice> slices_;  // increasing tau
};

struct GeodesicSample {
  double affine = 0.0;
  double t = 0.0;
  Eigen::VectorXd x;         // spatial position (unwrapped)
  Eigen::VectorXd velocity;  // (d t/dA, d x^i/dA)
  double causal_norm = 0.0;  // -n^2 (dt/dA)^2 + g_ab (dx^a/dA)(dx^b/dA)
};

struct GeodesicPath {
  std::vector<GeodesicSample> samples;
  double terminal_affine = 0.0;
  bool completed = false;  // reached t_min
  std::string abort_reason;
};

struct GeodesicOptions {
  double step_fraction = 0.002;  // affine step = step_fraction * t / |dt/dA|
  double causal_tolerance = 1e-8;
};

// Integrates the geodesic equations with RK4 in the affine parameter A from
// A = 0 at the event (t0, x0) until t = t_min, where the last step is cut by a
// secant search on t(A). Throws DomainError if velocity0 is not causal (to
// causal_tolerance) or not past-directed. A path that turns spacelike stops
// with completed = false.
GeodesicPath integrate_geodesic(const SpacetimeSampler& spacetime, double t0, std::span<const double> x0,
                                std::span<const double> velocity0, double t_min, const GeodesicOptions& options = {});

struct AffineBound {
  bool holds = false;
  double bound = 0.0;     // |A'(t0)| / (1 - sigma), with A'(t0) = 1 / (dt/dA)(t0)
  double terminal = 0.0;  // terminal affine parameter
  double margin = 0.0;    // bound - terminal
};

AffineBound affine_bound_check(const GeodesicPath& path, double sigma);

// Covariant spatial momenta g_ij dx^j/dA of a sample.
Eigen::VectorXd covariant_momenta(const SpacetimeSampler& spacetime, const GeodesicSample& s);

// Past-directed causal velocity at an event: spatial part `spatial`, time
// component chosen so the causal norm equals -mass^2 (mass >= 0).
Eigen::VectorXd causal_velocity(const SpacetimeSampler& spacetime, double t, std::span<const double> x,
                                std::span<const double> spatial, double mass);

// `count` past-directed causal velocities at an event, reproducible from
// `seed`: isotropically distributed spatial directions (in the coordinate
// frame) with coordinate speed in [0.1, 3] and mass in [0, 1].
std::vector<Eigen::VectorXd> random_causal_velocities(const SpacetimeSampler& spacetime, double t,
                                                      std::span<const double> x, int count, std::uint64_t seed);

}  // namespace kasnerlab
