#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kamgrid/ctmc.hpp"
#include "kamgrid/discounted.hpp"

namespace kamgrid {

struct MeasureAtom {
    std::size_t node = 0;
    Velocity velocity;
    double weight = 0.0;
};

/// Finitely supported probability on (node, velocity) pairs.
struct DiscreteMatherMeasure {
    std::vector<MeasureAtom> atoms;

    double total_weight() const {
        double s = 0.0;
        for (const auto& a : atoms) s += a.weight;
        return s;
    }
    /// Mean Euclidean speed under the measure.
    double mean_speed() const;
};

struct HolonomicReport {
    double residual = 0.0;
    int test_functions = 0;
    std::string basis; // "indicator", "random", or "indicator+random"
};

/// Occupation measure of the policy's stationary distribution:
/// atoms (x, pi(x)) weighted by the stationary mass at x.
DiscreteMatherMeasure mather_from_policy(const LatticeProblem& problem,
                                         const StationaryPolicy& policy);

/// Action integral: sum of weight * L(node, velocity).
double action(const LatticeProblem& problem, const DiscreteMatherMeasure& mu);

/// Worst normalized violation of the closed-measure identity
/// sum_atoms weight * (grad phi . v) over the full indicator basis plus
/// n_random_tests random grid functions.
HolonomicReport holonomic_residual(const LatticeProblem& problem, const DiscreteMatherMeasure& mu,
                                   int n_random_tests, std::uint64_t seed = 0x9d2c5680);

struct LpMatherResult {
    double value = 0.0;
    DiscreteMatherMeasure measure;
    double dual_residual = 0.0;
    double primal_residual = 0.0;
    long iterations = 0;
};

/// Minimizes the action over measures supported on the node set times a
/// finite velocity set, subject to the indicator-basis closed-measure
/// equalities. Velocities are the per-axis Cartesian grid augmented with the
/// policy velocity at each node (when a policy is supplied), which makes the
/// policy measure feasible and sandwiches the optimum.
LpMatherResult lp_mather_oracle(const LatticeProblem& problem,
                                const std::vector<double>& per_axis_velocities,
                                const StationaryPolicy* augment_policy = nullptr,
                                std::size_t max_variables = 50000);

} // namespace kamgrid
