#include "kasnerlab/lapse.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <sstream>

#include "kasnerlab/differentiation.hpp"
#include "kasnerlab/norms.hpp"

namespace kasnerlab {

namespace {

struct Coefficients {
  std::vector<Eigen::MatrixXd> gab;  // per point, P x P block of g^{ab} over active directions
  Eigen::MatrixXd gamma;             // P x points: g^{ab} Gamma^c_{ab} for active c
  Eigen::VectorXd sc;
};

Coefficients coefficients(const Field& ginv, const FieldJet& jet, const Field& sc) {
  const GridSpec& grid = ginv.grid();
  const int np = grid.num_active();
  const int npts = grid.num_points();
  const Field gam = contracted_christoffel(ginv, jet);
  Coefficients c;
  c.gab.resize(static_cast<std::size_t>(npts));
  c.gamma.resize(np, npts);
  c.sc = sc.data().row(0).transpose();
  for (int p = 0; p < npts; ++p) {
    const auto gi = ginv.matrix(p);
    Eigen::MatrixXd m(np, np);
    for (int a = 0; a < np; ++a) {
      for (int b = 0; b < np; ++b)
        m(a, b) = gi(grid.active[static_cast<std::size_t>(a)], grid.active[static_cast<std::size_t>(b)]);
      c.gamma(a, p) = gam(p, grid.active[static_cast<std::size_t>(a)]);
    }
    c.gab[static_cast<std::size_t>(p)] = m;
  }
  return c;
}

// t^2 (L - Sc) u - u, matrix free.
Eigen::VectorXd apply_scaled(const GridSpec& grid, const Coefficients& c, double t, const Eigen::VectorXd& u) {
  const int np = grid.num_active();
  Field f(grid, kScalar);
  f.data().row(0) = u.transpose();
  std::vector<Field> first;
  for (int a = 0; a < np; ++a) first.push_back(derivative(f, grid.active[static_cast<std::size_t>(a)], 1));
  Eigen::VectorXd lu = Eigen::VectorXd::Zero(u.size());
  for (int a = 0; a < np; ++a) {
    for (int b = a; b < np; ++b) {
      const Field dab = a == b ? derivative(f, grid.active[static_cast<std::size_t>(a)], 2)
                               : derivative(first[static_cast<std::size_t>(a)], grid.active[static_cast<std::size_t>(b)], 1);
      const double mult = a == b ? 1.0 : 2.0;
      for (int p = 0; p < u.size(); ++p) lu(p) += mult * c.gab[static_cast<std::size_t>(p)](a, b) * dab.value(p);
    }
    for (int p = 0; p < u.size(); ++p) lu(p) -= c.gamma(a, p) * first[static_cast<std::size_t>(a)].value(p);
  }
  return t * t * (lu - c.sc.cwiseProduct(u)) - u;
}

Eigen::MatrixXd assemble_scaled(const GridSpec& grid, const Coefficients& c, double t) {
  const int npts = grid.num_points();
  Eigen::MatrixXd a(npts, npts);
  for (int j = 0; j < npts; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(npts);
    e(j) = 1.0;
    a.col(j) = apply_scaled(grid, c, t, e);
  }
  return a;
}

// Constant-coefficient preconditioner t^2 gbar^{ab} d_a d_b - 1, inverted mode by mode.
class SpectralPreconditioner {
 public:
  SpectralPreconditioner(const GridSpec& grid, const Coefficients& c, double t) : grid_(grid) {
    const int np = grid.num_active();
    const int npts = grid.num_points();
    Eigen::MatrixXd gbar = Eigen::MatrixXd::Zero(np, np);
    for (const auto& m : c.gab) gbar += m;
    gbar /= static_cast<double>(npts);
    std::vector<Eigen::VectorXcd> s1, s2;
    for (int a = 0; a < np; ++a) {
      s1.push_back(derivative_symbol(grid.points[static_cast<std::size_t>(a)], 1, grid.scheme, grid.dealias));
      s2.push_back(derivative_symbol(grid.points[static_cast<std::size_t>(a)], 2, grid.scheme, grid.dealias));
    }
    inverse_symbol_.resize(npts);
    for (int p = 0; p < npts; ++p) {
      std::complex<double> sym(-1.0, 0.0);
      for (int a = 0; a < np; ++a) {
        const int ka = grid.index_along(p, a);
        sym += t * t * gbar(a, a) * s2[static_cast<std::size_t>(a)](ka);
        for (int b = a + 1; b < np; ++b)
          sym += 2.0 * t * t * gbar(a, b) * s1[static_cast<std::size_t>(a)](ka) *
                 s1[static_cast<std::size_t>(b)](grid.index_along(p, b));
      }
      inverse_symbol_(p) = 1.0 / sym;
    }
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& r) const {
    Eigen::VectorXcd v = r.cast<std::complex<double>>();
    transform(v, false);
    v = v.cwiseProduct(inverse_symbol_);
    transform(v, true);
    return v.real();
  }

 private:
  // The derivative symbol of mode kappa multiplies e^{2 pi i kappa j / n};
  // forward here means projecting onto those modes.
  void transform(Eigen::VectorXcd& v, bool inverse) const {
    const int np = grid_.num_active();
    for (int a = 0; a < np; ++a) {
      const int n = grid_.points[static_cast<std::size_t>(a)];
      const int stride = grid_.stride(a);
      std::vector<std::complex<double>> line(static_cast<std::size_t>(n)), out;
      for (int p = 0; p < v.size(); ++p) {
        if (grid_.index_along(p, a) != 0) continue;
        for (int i = 0; i < n; ++i) line[static_cast<std::size_t>(i)] = v(p + i * stride);
        if (inverse)
          fft_.inv(out, line);
        else
          fft_.fwd(out, line);
        for (int i = 0; i < n; ++i) v(p + i * stride) = out[static_cast<std::size_t>(i)];
      }
    }
  }

  GridSpec grid_;
  Eigen::VectorXcd inverse_symbol_;
  mutable Eigen::FFT<double> fft_;
};

double rms(const Eigen::VectorXd& v) { return std::sqrt(v.squaredNorm() / static_cast<double>(v.size())); }

// Right-preconditioned BiCGSTAB.
int bicgstab(const GridSpec& grid, const Coefficients& c, double t, const SpectralPreconditioner& pre,
             const Eigen::VectorXd& b, Eigen::VectorXd& x, double tol, int max_iterations, double& residual) {
  Eigen::VectorXd r = b - apply_scaled(grid, c, t, x);
  const Eigen::VectorXd r0 = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd p = Eigen::VectorXd::Zero(b.size());
  residual = rms(r);
  if (residual <= tol) return 0;
  for (int it = 1; it <= max_iterations; ++it) {
    const double rho_new = r0.dot(r);
    if (rho_new == 0.0) return it;
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    p = r + beta * (p - omega * v);
    const Eigen::VectorXd phat = pre.apply(p);
    v = apply_scaled(grid, c, t, phat);
    alpha = rho / r0.dot(v);
    const Eigen::VectorXd s = r - alpha * v;
    if (rms(s) <= tol) {
      x += alpha * phat;
      residual = rms(b - apply_scaled(grid, c, t, x));
      if (residual <= tol) return it;
      r = b - apply_scaled(grid, c, t, x);
      continue;
    }
    const Eigen::VectorXd shat = pre.apply(s);
    const Eigen::VectorXd tv = apply_scaled(grid, c, t, shat);
    omega = tv.dot(s) / tv.squaredNorm();
    x += alpha * phat + omega * shat;
    r = s - omega * tv;
    residual = rms(r);
    if (residual <= tol) {
      residual = rms(b - apply_scaled(grid, c, t, x));
      if (residual <= tol) return it;
    }
  }
  return max_iterations;
}

}  // namespace

std::pair<Field, LapseSolveReport> solve_lapse_equation(const Field& ginv, const FieldJet& metric_jet,
                                                        const Field& scalar_curv, double t, const Field& rhs,
                                                        const LapseOptions& options) {
  if (!(t > 0.0)) throw DomainError("lapse solve needs t > 0");
  const GridSpec& grid = ginv.grid();
  const int npts = grid.num_points();
  LapseSolveReport report;
  report.definite = t * t * sup_norm(scalar_curv) < 1.0;
  Field u(grid, kScalar);
  const Eigen::VectorXd b = rhs.data().row(0).transpose();
  if (b.isZero(0)) {
    report.iterations = 0;
    report.final_residual = 0.0;
    Field n = Field::constant_scalar(grid, 1.0);
    return {n, report};
  }
  const Coefficients c = coefficients(ginv, metric_jet, scalar_curv);
  Eigen::VectorXd x;
  if (npts <= options.dense_limit) {
    const Eigen::MatrixXd a = assemble_scaled(grid, c, t);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    x = lu.solve(b);
    Eigen::VectorXd r = b - a * x;
    for (int refine = 0; refine < 3 && rms(r) > options.tol; ++refine) {
      x += lu.solve(r);
      r = b - a * x;
    }
    report.direct = true;
    report.iterations = 1;
    report.final_residual = rms(r);
  } else {
    const SpectralPreconditioner pre(grid, c, t);
    x = Eigen::VectorXd::Zero(npts);
    double res = 0.0;
    report.direct = false;
    report.iterations = bicgstab(grid, c, t, pre, b, x, options.tol, options.max_iterations, res);
    report.final_residual = res;
  }
  if (!std::isfinite(report.final_residual) || report.final_residual > options.tol) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "lapse solve did not converge: residual " << report.final_residual << " > tol " << options.tol;
    throw SolverError(msg.str(), report.final_residual);
  }
  Field n(grid, kScalar);
  n.data().row(0) = (x.array() + 1.0).matrix().transpose();
  report.n_min = min_value(n);
  report.n_max = max_value(n);
  if (!(report.n_min > 0.0)) throw InvalidLapseError("lapse solve produced n <= 0", report.n_min);
  return {n, report};
}

std::pair<Field, LapseSolveReport> solve_lapse(const Field& ginv, const FieldJet& metric_jet, const Field& scalar_curv,
                                               double t, const LapseOptions& options) {
  return solve_lapse_equation(ginv, metric_jet, scalar_curv, t, (t * t) * scalar_curv, options);
}

std::pair<Field, LapseSolveReport> solve_lapse(const Field& g, const Field& ginv, const Field& scalar_curv, double t,
                                               const LapseOptions& options) {
  return solve_lapse(ginv, field_jet(g, true), scalar_curv, t, options);
}

Field lapse_operator(const Field& ginv, const FieldJet& metric_jet, const Field& scalar_curv, double t, const Field& f) {
  const Coefficients c = coefficients(ginv, metric_jet, scalar_curv);
  const Eigen::VectorXd u = f.data().row(0).transpose();
  Field out(f.grid(), kScalar);
  out.data().row(0) = (apply_scaled(f.grid(), c, t, u) / (t * t)).transpose();
  return out;
}

}  // namespace kasnerlab
