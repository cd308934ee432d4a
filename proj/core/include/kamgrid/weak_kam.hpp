#pragma once

#include <vector>

#include "kamgrid/discounted.hpp"

namespace kamgrid {

/// Geometric schedule of vanishing discounts with the Cauchy stopping policy.
struct ContinuationSchedule {
    double lambda0 = 1.0;
    double ratio = 0.5;        // in (0,1)
    double lambda_min = 1e-7;
    /// Cauchy tolerance on consecutive extrapolated iterates; the final
    /// residual target comes from SolverConfig::tolerance.
    double step_tolerance = 1e-9;
};

struct WeakKamSolution {
    double effective_h = 0.0;
    GridFunction psi;            // normalized: psi[anchor] = 0
    std::size_t anchor = 0;
    double residual = 0.0;
    std::vector<double> schedule_used;
    StationaryPolicy policy;
    int iterations = 0;
};

/// max_x |H(x, -(grad psi)(x)) - effective_h|.
double weak_kam_residual(const LatticeProblem& problem, const GridFunction& psi,
                         double effective_h);

/// Vanishing-discount continuation: discounted solves along the schedule with
/// warm-started policies, Richardson extrapolation of (psi, effective_h) in
/// the discount, and a final ergodic policy-iteration polish when the optimal
/// chain is unichain. Throws ConvergenceError when the schedule is exhausted
/// with the best iterate's residual attached.
WeakKamSolution solve_weak_kam(const LatticeProblem& problem,
                               const ContinuationSchedule& schedule = {},
                               const SolverConfig& cfg = {}, std::size_t anchor = 0);

/// Independent cross-check: anchored fixed-point iteration on the uniformized
/// ergodic operator over the truncated velocity box.
WeakKamSolution relative_value_iteration(const LatticeProblem& problem,
                                         const SolverConfig& cfg = {}, std::size_t anchor = 0);

/// Lipschitz extension of a lattice function to the whole torus:
/// x -> min over nodes y of psi(y) + c * wrap_distance(x, y).
class McShaneExtension {
public:
    McShaneExtension(Lattice lat, GridFunction values, double lipschitz)
        : lattice_(std::move(lat)), values_(std::move(values)), constant_(lipschitz) {}

    double operator()(const TorusPoint& x) const;
    double lipschitz_constant() const { return constant_; }

private:
    Lattice lattice_;
    GridFunction values_;
    double constant_;
};

/// Builds the extension; the constant is raised to the achieved discrete
/// Lipschitz ratio when the requested one would fail to interpolate.
McShaneExtension mcshane_extend(const Lattice& lat, const GridFunction& psi, double lipschitz);

/// Largest ratio |psi(x)-psi(y)| / wrap_distance(x,y) over neighbor pairs.
double discrete_lipschitz_ratio(const Lattice& lat, const GridFunction& psi);

} // namespace kamgrid
