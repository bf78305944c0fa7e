#include "kasnerlab/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "kasnerlab/differentiation.hpp"
#include "kasnerlab/tensor_algebra.hpp"

namespace kasnerlab {

SpacetimeSample KasnerSampler::sample(double t, std::span<const double> /*x*/) const {
  if (!(t > 0.0)) throw DomainError("Kasner sampler needs t > 0");
  const int d = q_.dim();
  SpacetimeSample s;
  s.n = 1.0;
  s.dt_n = 0.0;
  s.dn = Eigen::VectorXd::Zero(d);
  s.g = Eigen::MatrixXd::Zero(d, d);
  s.ginv = Eigen::MatrixXd::Zero(d, d);
  s.K = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    s.g(i, i) = std::pow(t, 2.0 * q_[i]);
    s.ginv(i, i) = std::pow(t, -2.0 * q_[i]);
    s.K(i, i) = -q_[i] / t;
  }
  return s;
}

SliceSampler::SliceSampler(std::vector<SolutionState> slices) {
  if (slices.size() < 2) throw DomainError("slice sampler needs at least two slices");
  grid_ = slices.front().g.grid();
  for (const auto& s : slices)
    if (!(s.g.grid() == grid_)) throw DomainError("all slices must share one grid");
  std::sort(slices.begin(), slices.end(), [](const SolutionState& a, const SolutionState& b) { return a.t > b.t; });
  for (auto& s : slices) {
    Slice sl;
    sl.tau = -std::log(s.t);
    for (int a = 0; a < grid_.num_active(); ++a) {
      sl.dg.push_back(derivative(s.g, grid_.active[static_cast<std::size_t>(a)], 1));
      sl.dn.push_back(derivative(s.n, grid_.active[static_cast<std::size_t>(a)], 1));
    }
    sl.g = std::move(s.g);
    sl.K = std::move(s.K);
    sl.n = std::move(s.n);
    if (!slices_.empty() && !(sl.tau > slices_.back().tau)) throw DomainError("slices must have distinct times");
    slices_.push_back(std::move(sl));
  }
}

int SliceSampler::dim() const { return grid_.dim; }
double SliceSampler::t_lower() const { return std::exp(-slices_.back().tau); }
double SliceSampler::t_upper() const { return std::exp(-slices_.front().tau); }

std::vector<double> SliceSampler::interpolation_weights(std::span<const double> x) const {
  const int np = grid_.num_active();
  std::vector<std::vector<double>> axis_w(static_cast<std::size_t>(np));
  for (int a = 0; a < np; ++a) {
    const int n = grid_.points[static_cast<std::size_t>(a)];
    double xi = x[static_cast<std::size_t>(grid_.active[static_cast<std::size_t>(a)])];
    xi -= std::floor(xi);
    auto& w = axis_w[static_cast<std::size_t>(a)];
    w.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      const double delta = xi - static_cast<double>(j) / n;
      double acc = 1.0 + std::cos(std::numbers::pi * n * delta);
      for (int k = 1; k < n / 2; ++k) acc += 2.0 * std::cos(2.0 * std::numbers::pi * k * delta);
      w[static_cast<std::size_t>(j)] = acc / n;
    }
  }
  std::vector<double> weights(static_cast<std::size_t>(grid_.num_points()), 1.0);
  for (int p = 0; p < grid_.num_points(); ++p)
    for (int a = 0; a < np; ++a)
      weights[static_cast<std::size_t>(p)] *= axis_w[static_cast<std::size_t>(a)][static_cast<std::size_t>(grid_.index_along(p, a))];
  return weights;
}

SpacetimeSample SliceSampler::sample_slice(const Slice& s, const std::vector<double>& weights) const {
  const int d = grid_.dim;
  const Eigen::Map<const Eigen::VectorXd> w(weights.data(), static_cast<Eigen::Index>(weights.size()));
  auto eval = [&](const Field& f) -> Eigen::VectorXd { return f.data() * w; };
  auto as_matrix = [d](const Eigen::VectorXd& v) -> Eigen::MatrixXd {
    return Eigen::Map<const RowMatrix<double>>(v.data(), d, d);
  };
  SpacetimeSample out;
  out.g = as_matrix(eval(s.g));
  out.K = as_matrix(eval(s.K));
  out.n = eval(s.n)(0);
  out.dn = Eigen::VectorXd::Zero(d);
  out.active = grid_.active;
  for (int a = 0; a < grid_.num_active(); ++a) {
    out.dn(grid_.active[static_cast<std::size_t>(a)]) = eval(s.dn[static_cast<std::size_t>(a)])(0);
    out.dg.push_back(as_matrix(eval(s.dg[static_cast<std::size_t>(a)])));
  }
  return out;
}

SpacetimeSample SliceSampler::sample(double t, std::span<const double> x) const {
  if (!(t > 0.0)) throw DomainError("slice sampler needs t > 0");
  const double tau = -std::log(t);
  const double eps = 1e-12;
  if (tau < slices_.front().tau - eps || tau > slices_.back().tau + eps)
    throw DomainError("t = " + std::to_string(t) + " lies outside the stored slices");
  std::size_t k = 0;
  while (k + 2 < slices_.size() && tau > slices_[k + 1].tau) ++k;
  const Slice& a = slices_[k];
  const Slice& b = slices_[k + 1];
  const double span = b.tau - a.tau;
  const double lambda = std::clamp((tau - a.tau) / span, 0.0, 1.0);
  const std::vector<double> w = interpolation_weights(x);
  const SpacetimeSample sa = sample_slice(a, w);
  const SpacetimeSample sb = sample_slice(b, w);
  SpacetimeSample s;
  s.active = sa.active;
  s.g = (1.0 - lambda) * sa.g + lambda * sb.g;
  s.g = 0.5 * (s.g + s.g.transpose()).eval();
  s.ginv = s.g.llt().solve(Eigen::MatrixXd::Identity(grid_.dim, grid_.dim));
  s.K = (1.0 - lambda) * sa.K + lambda * sb.K;
  s.n = (1.0 - lambda) * sa.n + lambda * sb.n;
  s.dn = (1.0 - lambda) * sa.dn + lambda * sb.dn;
  for (std::size_t i = 0; i < sa.dg.size(); ++i) s.dg.push_back((1.0 - lambda) * sa.dg[i] + lambda * sb.dg[i]);
  // d_t n = -(1/t) d_tau n
  s.dt_n = -(sb.n - sa.n) / span / t;
  return s;
}

namespace {

// Y = (t, x, dt/dA, dx/dA)
using State = Eigen::VectorXd;

double causal_norm_of(const SpacetimeSample& s, double u0, const Eigen::VectorXd& u) {
  return -s.n * s.n * u0 * u0 + u.dot(s.g * u);
}

State geodesic_rhs(const SpacetimeSampler& st, const State& y) {
  const int d = st.dim();
  const double t = y(0);
  const Eigen::VectorXd x = y.segment(1, d);
  const double u0 = y(d + 1);
  const Eigen::VectorXd u = y.segment(d + 2, d);
  const SpacetimeSample s = st.sample(t, std::span<const double>(x.data(), static_cast<std::size_t>(d)));
  State dy(y.size());
  dy(0) = u0;
  dy.segment(1, d) = u;
  const double n = s.n;
  dy(d + 1) = -(s.dt_n / n * u0 * u0 + 2.0 * s.dn.dot(u) / n * u0 - u.dot(s.g * (s.K * u)) / n);
  Eigen::VectorXd acc = -n * u0 * u0 * (s.ginv * s.dn) + 2.0 * n * u0 * (s.K * u);
  if (!s.dg.empty()) {
    Eigen::VectorXd lowered = Eigen::VectorXd::Zero(d);  // Gamma_{c ab} u^a u^b with the first index lowered
    for (std::size_t a = 0; a < s.dg.size(); ++a) {
      const int dir = s.active[a];
      const Eigen::VectorXd dgu = s.dg[a] * u;
      lowered += u(dir) * dgu;
      lowered(dir) -= 0.5 * u.dot(dgu);
    }
    acc -= s.ginv * lowered;
  }
  dy.segment(d + 2, d) = acc;
  return dy;
}

State rk4(const SpacetimeSampler& st, const State& y, double h) {
  const State k1 = geodesic_rhs(st, y);
  const State k2 = geodesic_rhs(st, y + 0.5 * h * k1);
  const State k3 = geodesic_rhs(st, y + 0.5 * h * k2);
  const State k4 = geodesic_rhs(st, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

GeodesicSample make_sample(const SpacetimeSampler& st, const State& y, double affine) {
  const int d = st.dim();
  GeodesicSample g;
  g.affine = affine;
  g.t = y(0);
  g.x = y.segment(1, d);
  g.velocity = y.segment(d + 1, d + 1);
  const SpacetimeSample s = st.sample(g.t, std::span<const double>(g.x.data(), static_cast<std::size_t>(d)));
  g.causal_norm = causal_norm_of(s, g.velocity(0), g.velocity.tail(d));
  return g;
}

}  // namespace

GeodesicPath integrate_geodesic(const SpacetimeSampler& st, double t0, std::span<const double> x0,
                                std::span<const double> velocity0, double t_min, const GeodesicOptions& options) {
  const int d = st.dim();
  if (static_cast<int>(x0.size()) != d || static_cast<int>(velocity0.size()) != d + 1)
    throw DomainError("geodesic start needs D coordinates and D + 1 velocity components");
  if (!(t_min > 0.0) || !(t_min < t0)) throw DomainError("geodesic needs 0 < t_min < t0");
  if (t0 > st.t_upper() + 1e-12 || t_min < st.t_lower() - 1e-12)
    throw DomainError("geodesic time range exceeds the sampled spacetime");
  State y(2 * d + 2);
  y(0) = t0;
  for (int i = 0; i < d; ++i) y(1 + i) = x0[static_cast<std::size_t>(i)];
  for (int i = 0; i <= d; ++i) y(d + 1 + i) = velocity0[static_cast<std::size_t>(i)];
  if (!(y(d + 1) < 0.0)) throw DomainError("initial velocity must be past directed (dt/dA < 0)");

  GeodesicPath path;
  GeodesicSample first = make_sample(st, y, 0.0);
  auto scale = [](const GeodesicSample& s) { return std::max(1.0, s.velocity(0) * s.velocity(0)); };
  if (first.causal_norm > options.causal_tolerance * scale(first))
    throw DomainError("initial velocity is not causal (g4(v, v) = " + std::to_string(first.causal_norm) + ")");
  path.samples.push_back(first);

  double affine = 0.0;
  const int max_steps = 10'000'000;
  for (int it = 0; it < max_steps; ++it) {
    const double t = y(0);
    const double u0 = y(d + 1);
    if (!(u0 < 0.0)) {
      path.abort_reason = "geodesic stopped moving toward the past";
      break;
    }
    double h = options.step_fraction * t / std::abs(u0);
    State next = rk4(st, y, h);
    bool last = false;
    if (next(0) <= t_min) {
      // secant on t(h) - t_min, bracketed by [0, h]
      double ha = 0.0, fa = t - t_min;
      double hb = h, fb = next(0) - t_min;
      if (!std::isfinite(fb)) {
        hb = fa / std::abs(u0);
        next = rk4(st, y, hb);
        fb = next(0) - t_min;
      }
      for (int k = 0; k < 60 && std::abs(fb) > 1e-15 * t_min; ++k) {
        const double hc = hb - fb * (hb - ha) / (fb - fa);
        ha = hb;
        fa = fb;
        hb = hc;
        next = rk4(st, y, hb);
        fb = next(0) - t_min;
      }
      h = hb;
      last = true;
    }
    y = next;
    affine += h;
    GeodesicSample s = make_sample(st, y, affine);
    const double norm = s.causal_norm;
    const bool spacelike = norm > options.causal_tolerance * scale(s);
    path.samples.push_back(std::move(s));
    if (spacelike) {
      path.abort_reason = "geodesic turned spacelike";
      break;
    }
    if (last) {
      path.completed = true;
      break;
    }
  }
  path.terminal_affine = affine;
  return path;
}

AffineBound affine_bound_check(const GeodesicPath& path, double sigma) {
  if (path.samples.empty()) throw DomainError("empty geodesic path");
  if (!(sigma > 0.0 && sigma < 1.0 / 6.0)) throw DomainError("sigma must lie in (0, 1/6)");
  AffineBound b;
  const double u0 = path.samples.front().velocity(0);
  b.bound = std::abs(1.0 / u0) / (1.0 - sigma);
  b.terminal = path.terminal_affine;
  b.margin = b.bound - b.terminal;
  b.holds = b.terminal <= b.bound;
  return b;
}

Eigen::VectorXd covariant_momenta(const SpacetimeSampler& st, const GeodesicSample& s) {
  const int d = st.dim();
  const SpacetimeSample sm = st.sample(s.t, std::span<const double>(s.x.data(), static_cast<std::size_t>(d)));
  return sm.g * s.velocity.tail(d);
}

Eigen::VectorXd causal_velocity(const SpacetimeSampler& st, double t, std::span<const double> x,
                                std::span<const double> spatial, double mass) {
  const int d = st.dim();
  if (static_cast<int>(spatial.size()) != d) throw DomainError("spatial velocity needs D components");
  if (!(mass >= 0.0)) throw DomainError("mass must be nonnegative");
  const SpacetimeSample s = st.sample(t, x);
  const Eigen::Map<const Eigen::VectorXd> u(spatial.data(), d);
  const double u0 = -std::sqrt(mass * mass + u.dot(s.g * u)) / s.n;
  Eigen::VectorXd v(d + 1);
  v(0) = u0;
  v.tail(d) = u;
  return v;
}

std::vector<Eigen::VectorXd> random_causal_velocities(const SpacetimeSampler& st, double t, std::span<const double> x,
                                                      int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> speed(0.1, 3.0);
  std::uniform_real_distribution<double> mass(0.0, 1.0);
  const int d = st.dim();
  std::vector<Eigen::VectorXd> out;
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd dir(d);
    for (int i = 0; i < d; ++i) dir(i) = normal(rng);
    const Eigen::VectorXd u = speed(rng) * dir.normalized();
    out.push_back(causal_velocity(st, t, x, std::span<const double>(u.data(), static_cast<std::size_t>(d)), mass(rng)));
  }
  return out;
}

}  // namespace kasnerlab
