#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "kamgrid/ctmc.hpp"
#include "kamgrid/discounted.hpp"

namespace kamgrid {

/// Feedback strategy for simulation: velocity as a function of (time, node).
/// Stationary policies are wrapped automatically.
struct SimStrategy {
    std::function<Velocity(double t, std::size_t node)> velocity;
    double bound = 0.0; // declared sup of the Euclidean speed

    static SimStrategy from_policy(const StationaryPolicy& policy);
    static SimStrategy constant(Velocity v);
};

struct SimConfig {
    std::uint64_t seed = 0;
    int samples = 1;
    double horizon = 1.0;
    std::optional<double> discount;
    std::vector<double> record_times;
};

/// One realization of the jump chain together with the continuous companion
/// driven by the same strategy; both kept as unwrapped lifts.
struct CoupledPath {
    int dim = 0;
    std::vector<double> times;        // event times, starting at 0
    std::vector<std::size_t> nodes;   // lattice state after each event
    std::vector<double> chain_lift;   // unwrapped chain coordinates, (k+1) x dim
    std::vector<double> flow_lift;    // unwrapped continuous companion, (k+1) x dim

    std::vector<double> chain_lift_at(double t) const;
    std::vector<double> flow_lift_at(double t) const;
    TorusPoint chain_point_at(double t) const;
    TorusPoint flow_point_at(double t) const;
    std::size_t node_at(double t) const;
};

/// Gillespie simulation of the controlled chain from a node; reproducible
/// from the seed. The flow companion starts at flow_start (defaults to the
/// chain's start) and integrates the strategy exactly between jumps.
CoupledPath simulate_chain(const LatticeProblem& problem, const SimStrategy& strategy,
                           std::size_t start_node, double horizon, std::uint64_t seed,
                           const std::vector<double>* flow_start = nullptr);

struct CouplingReport {
    std::vector<double> times;
    std::vector<double> mean_square_gap;
    std::vector<double> standard_error;
    std::vector<double> bound;               // initial distance + sqrt(d) c t / N
    std::vector<double> bound_squared_start; // informational variant
    std::vector<bool> pass;                  // mean <= bound + 3 stderr
    int samples = 0;
    std::uint64_t seed = 0;
};

/// Monte-Carlo estimate of E|flow - chain|^2 at the requested times against
/// the closed-form bound. Lifts are chosen so the initial lift distance
/// equals the torus distance.
CouplingReport estimate_coupling_gap(const LatticeProblem& problem, const SimStrategy& strategy,
                                     const TorusPoint& flow_start, const NodeIndex& chain_start,
                                     const std::vector<double>& times, const SimConfig& cfg);

struct DiscountedCostEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
    double truncation_bound = 0.0;
    double horizon = 0.0;
    int samples = 0;
};

/// Sample mean of the discounted running cost of a strategy, integrated in
/// closed form between jumps, with the analytic tail bound for the horizon.
DiscountedCostEstimate estimate_discounted_cost(const LatticeProblem& problem,
                                                const SimStrategy& strategy,
                                                std::size_t start_node, double discount,
                                                const SimConfig& cfg);

} // namespace kamgrid
