#include "kamgrid/discounted.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "kamgrid/errors.hpp"
#include "kamgrid/linear_systems.hpp"

namespace kamgrid {

GridFunction policy_running_cost(const LatticeProblem& problem, const StationaryPolicy& policy) {
    const auto& lat = problem.lattice;
    GridFunction cost(lat.node_count());
    for (std::size_t i = 0; i < lat.node_count(); ++i) {
        cost[i] = eval_L(problem.lagrangian, lat.node_point(i), policy.velocity(i));
    }
    return cost;
}

StationaryPolicy optimal_policy(const LatticeProblem& problem, const GridFunction& phi) {
    const auto& lat = problem.lattice;
    StationaryPolicy policy = StationaryPolicy::zero(lat.dim, lat.node_count());
    for (std::size_t i = 0; i < lat.node_count(); ++i) {
        DiscreteGradient xi = discrete_gradient(lat, phi, i);
        for (auto& p : xi.pairs) {
            p.first = -p.first;
            p.second = -p.second;
        }
        auto res = lattice_hamiltonian(problem.lagrangian, lat.node_point(i), xi);
        auto v = policy.velocity(i);
        for (int a = 0; a < lat.dim; ++a) v[a] = res.argmax[a];
    }
    return policy;
}

double bellman_residual(const LatticeProblem& problem, const GridFunction& phi, double discount) {
    const auto& lat = problem.lattice;
    double worst = 0.0;
    for (std::size_t i = 0; i < lat.node_count(); ++i) {
        DiscreteGradient xi = discrete_gradient(lat, phi, i);
        for (auto& p : xi.pairs) {
            p.first = -p.first;
            p.second = -p.second;
        }
        double h = lattice_hamiltonian(problem.lagrangian, lat.node_point(i), xi).value;
        worst = std::max(worst, std::abs(discount * phi[i] + h));
    }
    return worst;
}

namespace {

DiscountedSolution solve_policy_iteration(const LatticeProblem& problem, double discount,
                                          const SolverConfig& cfg,
                                          const StationaryPolicy* initial_policy) {
    const auto& lat = problem.lattice;
    DiscountedSolution sol;
    sol.discount = discount;
    sol.policy = initial_policy ? *initial_policy : StationaryPolicy::zero(lat.dim, lat.node_count());

    double residual = 0.0;
    for (int it = 1; it <= cfg.max_policy_iterations; ++it) {
        sol.iterations = it;
        PolicyGenerator gen = build_policy_generator(lat, sol.policy);
        GridFunction cost = policy_running_cost(problem, sol.policy);
        if (cfg.use_gauss_seidel) {
            double scale = 1.0;
            for (double c : cost) scale = std::max(scale, std::abs(c));
            double lin_res = gauss_seidel_resolvent(gen, discount, cost, sol.value, 64);
            int spent = 64;
            while (lin_res > 1e-12 * scale && spent < cfg.max_inner_iterations) {
                lin_res = gauss_seidel_resolvent(gen, discount, cost, sol.value, 64);
                spent += 64;
            }
        } else {
            sol.value = solve_resolvent(gen, discount, cost);
        }

        StationaryPolicy improved = optimal_policy(problem, sol.value);
        residual = bellman_residual(problem, sol.value, discount);
        bool stable = improved.velocities == sol.policy.velocities;
        sol.policy = std::move(improved);
        if (residual <= cfg.tolerance || stable) {
            sol.residual = residual;
            return sol;
        }
    }
    sol.residual = residual;
    throw ConvergenceError("solve_discounted: policy iteration budget exhausted", residual);
}

DiscountedSolution solve_value_iteration(const LatticeProblem& problem, double discount,
                                         const SolverConfig& cfg) {
    const auto& lat = problem.lattice;
    const int d = lat.dim;
    DiagnosticConstants constants =
        diagnostic_constants(problem.lagrangian, cfg.sampling_resolution);
    double box = constants.c5 + 1.0; // truncation radius for the velocity search
    double uniform_rate = lat.resolution * static_cast<double>(d) * box;

    GridFunction phi(lat.node_count(), 0.0);
    GridFunction next(lat.node_count(), 0.0);
    double residual = 0.0;
    for (int it = 1; it <= cfg.max_inner_iterations; ++it) {
        double change = 0.0;
        for (std::size_t i = 0; i < lat.node_count(); ++i) {
            TorusPoint x = lat.node_point(i);
            // best = min over the box of [L + Q phi](x), via per-axis capped
            // conjugates in the separable case
            double best;
            DiscreteGradient xi = discrete_gradient(lat, phi, i);
            if (problem.lagrangian.generic_hook) {
                for (auto& p : xi.pairs) {
                    p.first = -p.first;
                    p.second = -p.second;
                }
                best = -lattice_hamiltonian(problem.lagrangian, x, xi).value;
            } else {
                best = problem.lagrangian.potential.value(x);
                for (int a = 0; a < d; ++a) {
                    AxisConjugate pos =
                        axis_conjugate_capped(-xi.pairs[a].first, problem.lagrangian.kinetic[a], box);
                    AxisConjugate neg =
                        axis_conjugate_capped(-xi.pairs[a].second, problem.lagrangian.kinetic[a], box);
                    best -= std::max(pos.value, neg.value);
                }
            }
            next[i] = (uniform_rate * phi[i] + best) / (discount + uniform_rate);
            change = std::max(change, std::abs(next[i] - phi[i]));
        }
        phi.swap(next);
        // change*(discount+rate) equals the Bellman residual of the previous
        // iterate whenever the box is inactive
        residual = change * (discount + uniform_rate);
        if (residual <= 0.3 * cfg.tolerance) {
            double measured = bellman_residual(problem, phi, discount);
            if (measured > cfg.tolerance && it < cfg.max_inner_iterations) continue;
            DiscountedSolution sol;
            sol.discount = discount;
            sol.value = phi;
            sol.policy = optimal_policy(problem, phi);
            sol.residual = measured;
            sol.iterations = it;
            if (sol.policy.max_speed() >= box) {
                std::cerr << "solve_discounted: velocity box is active (|v|="
                          << sol.policy.max_speed() << ", box=" << box << ")\n";
            }
            return sol;
        }
    }
    throw ConvergenceError("solve_discounted: value iteration budget exhausted", residual);
}

} // namespace

DiscountedSolution solve_discounted(const LatticeProblem& problem, double discount,
                                    const SolverConfig& cfg,
                                    const StationaryPolicy* initial_policy) {
    if (discount <= 0.0) throw std::invalid_argument("solve_discounted: discount must be positive");
    if (discount < 1e-6) {
        std::cerr << "solve_discounted: discount " << discount
                  << " is badly conditioned; prefer the ergodic solver\n";
    }
    if (cfg.method == SolverConfig::Method::value_iteration)
        return solve_value_iteration(problem, discount, cfg);
    return solve_policy_iteration(problem, discount, cfg, initial_policy);
}

} // namespace kamgrid
