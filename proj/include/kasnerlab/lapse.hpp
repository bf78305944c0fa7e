#pragma once

#include <utility>

#include "kasnerlab/field.hpp"
#include "kasnerlab/geometry.hpp"

namespace kasnerlab {

struct LapseOptions {
  double tol = 1e-12;         // on the RMS residual of the t^2-scaled equation
  int max_iterations = 500;   // Krylov cap
  int dense_limit = 4096;     // direct factorization up to this many unknowns
};

struct LapseSolveReport {
  int iterations = 0;          // 0: trivial solve (Sc = 0); 1: direct factorization
  double final_residual = 0.0; // RMS over the grid of t^2 (L - Sc) u - u - t^2 Sc
  double n_min = 1.0;
  double n_max = 1.0;
  bool definite = true;        // t^2 ||Sc||_inf < 1
  bool direct = true;
};

// Solves g^{ab} nabla_a nabla_b n = t^{-2}(n - 1) + n Sc for u = n - 1:
//   t^2 (L - Sc) u - u = t^2 Sc,   L = g^{ab} d_a d_b - g^{ab} Gamma^c_{ab} d_c.
// Direct LU up to `dense_limit` unknowns, otherwise BiCGSTAB preconditioned
// by the constant-coefficient operator inverted with the DFT.
// Throws SolverError on non-convergence and InvalidLapseError if n_min <= 0.
std::pair<Field, LapseSolveReport> solve_lapse(const Field& g, const Field& ginv, const Field& scalar_curv, double t,
                                               const LapseOptions& options = {});

// Same, reusing a metric jet computed by the caller.
std::pair<Field, LapseSolveReport> solve_lapse(const Field& ginv, const FieldJet& metric_jet, const Field& scalar_curv,
                                               double t, const LapseOptions& options = {});

// Solves t^2 (L - Sc) u - u = rhs and returns n = 1 + u.
// Used for manufactured solutions; solve_lapse passes rhs = t^2 Sc.
std::pair<Field, LapseSolveReport> solve_lapse_equation(const Field& ginv, const FieldJet& metric_jet,
                                                        const Field& scalar_curv, double t, const Field& rhs,
                                                        const LapseOptions& options = {});

// g^{ab} nabla_a nabla_b f - (t^{-2} + Sc) f, applied to a scalar field.
Field lapse_operator(const Field& ginv, const FieldJet& metric_jet, const Field& scalar_curv, double t, const Field& f);

}  // namespace kasnerlab
