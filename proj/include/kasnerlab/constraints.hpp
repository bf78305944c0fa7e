#pragma once

#include "kasnerlab/field.hpp"
#include "kasnerlab/geometry.hpp"

namespace kasnerlab {

struct ConstraintResiduals {
  Field hamiltonian;  // Sc - K^a_b K^b_a + t^{-2}
  Field momentum;     // (0,1): nabla_a K^a_i
  Field cmc_trace;    // K^a_a + 1/t
  double hamiltonian_sup = 0.0;
  double momentum_sup = 0.0;  // sup of the frame norm
  double cmc_sup = 0.0;

  // max(t^2 H, t M, t C): the residuals in units of the rescaled variables.
  double scaled_max(double t) const;
};

Field hamiltonian_residual(const SolutionState& state, const GeometryCache& geometry);
Field hamiltonian_residual(const SolutionState& state);

Field momentum_residual(const SolutionState& state, const GeometryCache& geometry);
Field momentum_residual(const SolutionState& state);

Field cmc_residual(const SolutionState& state);

ConstraintResiduals constraint_residuals(const SolutionState& state, const GeometryCache& geometry);
ConstraintResiduals constraint_residuals(const SolutionState& state);

}  // namespace kasnerlab
