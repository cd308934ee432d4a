#pragma once

#include <cstddef>

#include "kamgrid/ctmc.hpp"
#include "kamgrid/lattice.hpp"

namespace kamgrid {

/// Solve (discount I - Q) phi = rhs for a policy generator. Strictly
/// diagonally dominant for discount > 0; solved directly with one step of
/// iterative refinement so the residual sits near rounding level.
GridFunction solve_resolvent(const PolicyGenerator& gen, double discount,
                             const GridFunction& rhs);

/// Gauss-Seidel sweeps in natural node ordering for the same system;
/// refines phi in place and returns the max-norm residual. Kept as the
/// iterative option; convergence follows from diagonal dominance.
double gauss_seidel_resolvent(const PolicyGenerator& gen, double discount,
                              const GridFunction& rhs, GridFunction& phi, int sweeps);

/// max_x |(discount I - Q) phi - rhs|(x).
double resolvent_residual(const PolicyGenerator& gen, double discount, const GridFunction& rhs,
                          const GridFunction& phi);

struct ErgodicEvaluation {
    GridFunction relative_value; // zero at the anchor
    double gain = 0.0;           // constant with Q psi + running_cost + gain = 0;
                                 // equals minus the long-run average cost
    bool solved = false;
};

/// Solve Q psi + running_cost + gain = 0 simultaneously for psi (anchored)
/// and the scalar gain. Fails (solved = false) when the chain is not unichain.
ErgodicEvaluation solve_ergodic_evaluation(const PolicyGenerator& gen,
                                           const GridFunction& running_cost,
                                           std::size_t anchor);

} // namespace kamgrid
