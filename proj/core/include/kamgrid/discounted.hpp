#pragma once

#include <optional>

#include "kamgrid/ctmc.hpp"
#include "kamgrid/lagrangian.hpp"
#include "kamgrid/lattice.hpp"

namespace kamgrid {

/// Full discrete problem instance: the lattice and the running cost on it.
struct LatticeProblem {
    Lattice lattice;
    LagrangianSpec lagrangian;

    LatticeProblem(Lattice lat, LagrangianSpec spec)
        : lattice(std::move(lat)), lagrangian(std::move(spec)) {}
};

struct SolverConfig {
    double tolerance = 1e-10;       // max-norm Bellman residual at exit
    int max_policy_iterations = 200;
    int max_inner_iterations = 20000; // Gauss-Seidel / value-iteration budget
    enum class Method { policy_iteration, value_iteration };
    Method method = Method::policy_iteration;
    bool use_gauss_seidel = false;  // iterative instead of direct policy evaluation
    int sampling_resolution = 0;    // for the diagnostic constants (0 = default)
};

struct DiscountedSolution {
    double discount = 0.0;
    GridFunction value;
    StationaryPolicy policy;
    double residual = 0.0;
    int iterations = 0;
};

/// Node-wise maximizer of the lattice Hamiltonian at xi = -(discrete
/// gradient of phi); deterministic under the tie rule.
StationaryPolicy optimal_policy(const LatticeProblem& problem, const GridFunction& phi);

/// max_x |discount*phi(x) + H(x, -(grad phi)(x))|.
double bellman_residual(const LatticeProblem& problem, const GridFunction& phi, double discount);

/// Solve discount*phi + H(x, -(grad phi)) = 0. Policy iteration with exact
/// closed-form improvement is the primary method; value iteration on the
/// uniformized chain over a truncated velocity box is available as an
/// independent path. Throws ConvergenceError when the budget runs out.
DiscountedSolution solve_discounted(const LatticeProblem& problem, double discount,
                                    const SolverConfig& cfg = {},
                                    const StationaryPolicy* initial_policy = nullptr);

/// Running cost of a policy, node-wise: L(x, pi(x)).
GridFunction policy_running_cost(const LatticeProblem& problem, const StationaryPolicy& policy);

} // namespace kamgrid
