#include "kamgrid/weak_kam.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "kamgrid/errors.hpp"
#include "kamgrid/linear_systems.hpp"

namespace kamgrid {

double weak_kam_residual(const LatticeProblem& problem, const GridFunction& psi,
                         double effective_h) {
    const auto& lat = problem.lattice;
    double worst = 0.0;
    for (std::size_t i = 0; i < lat.node_count(); ++i) {
        DiscreteGradient xi = discrete_gradient(lat, psi, i);
        for (auto& p : xi.pairs) {
            p.first = -p.first;
            p.second = -p.second;
        }
        double h = lattice_hamiltonian(problem.lagrangian, lat.node_point(i), xi).value;
        worst = std::max(worst, std::abs(h - effective_h));
    }
    return worst;
}

namespace {

struct AnchoredPair {
    GridFunction psi;
    double effective_h = 0.0;
};

AnchoredPair anchored(const GridFunction& phi, double discount, std::size_t anchor) {
    AnchoredPair out;
    out.psi.resize(phi.size());
    double ref = phi[anchor];
    for (std::size_t i = 0; i < phi.size(); ++i) out.psi[i] = phi[i] - ref;
    out.effective_h = -discount * ref;
    return out;
}

double sup_gap(const GridFunction& a, const GridFunction& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

/// Ergodic policy iteration started from a near-optimal policy: alternate the
/// anchored linear evaluation of (psi, gain) with closed-form improvement.
/// Returns false when the evaluation system is singular (multichain chain).
bool ergodic_polish(const LatticeProblem& problem, std::size_t anchor, const SolverConfig& cfg,
                    StationaryPolicy& policy, AnchoredPair& pair, double& residual) {
    bool any = false;
    double best_residual = residual;
    for (int round = 0; round < 50; ++round) {
        PolicyGenerator gen = build_policy_generator(problem.lattice, policy);
        GridFunction cost = policy_running_cost(problem, policy);
        ErgodicEvaluation eval = solve_ergodic_evaluation(gen, cost, anchor);
        if (!eval.solved) return any;
        double r = weak_kam_residual(problem, eval.relative_value, eval.gain);
        StationaryPolicy improved = optimal_policy(problem, eval.relative_value);
        bool stable = improved.velocities == policy.velocities;
        if (r < best_residual) {
            pair.psi = eval.relative_value;
            pair.effective_h = eval.gain;
            best_residual = r;
            any = true;
        }
        policy = std::move(improved);
        if (stable || best_residual <= cfg.tolerance) break;
    }
    residual = best_residual;
    return any;
}

} // namespace

WeakKamSolution solve_weak_kam(const LatticeProblem& problem, const ContinuationSchedule& schedule,
                               const SolverConfig& cfg, std::size_t anchor) {
    if (!(schedule.ratio > 0.0 && schedule.ratio < 1.0))
        throw std::invalid_argument("solve_weak_kam: ratio must lie in (0,1)");
    if (anchor >= problem.lattice.node_count())
        throw std::invalid_argument("solve_weak_kam: anchor out of range");

    WeakKamSolution sol;
    sol.anchor = anchor;

    AnchoredPair prev_raw, prev_extr;
    double prev_lambda = 0.0;
    bool have_prev = false, have_extr = false;
    bool cauchy_ok = false;

    StationaryPolicy warm = StationaryPolicy::zero(problem.lattice.dim,
                                                   problem.lattice.node_count());
    AnchoredPair best;
    double best_residual = std::numeric_limits<double>::infinity();

    for (double lambda = schedule.lambda0; lambda >= schedule.lambda_min * (1.0 - 1e-12);
         lambda *= schedule.ratio) {
        SolverConfig step_cfg = cfg;
        // Bellman residuals at discount lambda cannot be read below the
        // cancellation floor of phi ~ 1/lambda; policy stability still makes
        // each step exact.
        step_cfg.tolerance = std::max(cfg.tolerance, 1e-12 / lambda);
        DiscountedSolution step = solve_discounted(problem, lambda, step_cfg, &warm);
        warm = step.policy;
        sol.schedule_used.push_back(lambda);
        sol.iterations += step.iterations;

        AnchoredPair raw = anchored(step.value, lambda, anchor);
        if (have_prev) {
            // Richardson extrapolation in lambda removes the O(lambda) term.
            AnchoredPair extr;
            extr.effective_h =
                (raw.effective_h * prev_lambda - prev_raw.effective_h * lambda) /
                (prev_lambda - lambda);
            extr.psi.resize(raw.psi.size());
            for (std::size_t i = 0; i < raw.psi.size(); ++i) {
                extr.psi[i] =
                    (raw.psi[i] * prev_lambda - prev_raw.psi[i] * lambda) / (prev_lambda - lambda);
            }
            double r = weak_kam_residual(problem, extr.psi, extr.effective_h);
            if (r < best_residual) {
                best = extr;
                best_residual = r;
            }
            if (have_extr) {
                double gap = std::max(sup_gap(extr.psi, prev_extr.psi),
                                      std::abs(extr.effective_h - prev_extr.effective_h));
                if (gap <= schedule.step_tolerance && r <= 10.0 * schedule.step_tolerance) {
                    prev_extr = extr;
                    cauchy_ok = true;
                    break;
                }
            }
            prev_extr = extr;
            have_extr = true;
        }
        prev_raw = raw;
        prev_lambda = lambda;
        have_prev = true;
    }

    if (!have_extr) {
        // Degenerate schedules (single step); fall back to the raw pair.
        best = prev_raw;
        best_residual = weak_kam_residual(problem, best.psi, best.effective_h);
    }

    StationaryPolicy polish_policy = optimal_policy(problem, best.psi);
    ergodic_polish(problem, anchor, cfg, polish_policy, best, best_residual);

    sol.psi = best.psi;
    sol.effective_h = best.effective_h;
    sol.residual = best_residual;
    sol.policy = optimal_policy(problem, sol.psi);

    if (!cauchy_ok && sol.residual > 10.0 * schedule.step_tolerance) {
        throw ConvergenceError("solve_weak_kam: schedule exhausted before tolerances met",
                               sol.residual);
    }
    return sol;
}

WeakKamSolution relative_value_iteration(const LatticeProblem& problem, const SolverConfig& cfg,
                                         std::size_t anchor) {
    const auto& lat = problem.lattice;
    const int d = lat.dim;
    if (anchor >= lat.node_count())
        throw std::invalid_argument("relative_value_iteration: anchor out of range");

    DiagnosticConstants constants =
        diagnostic_constants(problem.lagrangian, cfg.sampling_resolution);
    double box = constants.c5 + 1.0;
    double uniform_rate = lat.resolution * static_cast<double>(d) * box;

    GridFunction phi(lat.node_count(), 0.0);
    GridFunction next(lat.node_count(), 0.0);
    WeakKamSolution sol;
    sol.anchor = anchor;

    double h_estimate = 0.0;
    const int budget = std::max(cfg.max_inner_iterations, 200000);
    for (int it = 1; it <= budget; ++it) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < lat.node_count(); ++i) {
            TorusPoint x = lat.node_point(i);
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
            double increment = best / uniform_rate;
            next[i] = phi[i] + increment;
            lo = std::min(lo, increment);
            hi = std::max(hi, increment);
        }
        double shift = next[anchor];
        for (std::size_t i = 0; i < lat.node_count(); ++i) next[i] -= shift;
        phi.swap(next);
        sol.iterations = it;
        // Span bounds: the effective constant lies in
        // [-rate*hi, -rate*lo]; stop when they pinch.
        h_estimate = -uniform_rate * 0.5 * (lo + hi);
        if (uniform_rate * (hi - lo) <= std::max(cfg.tolerance, 1e-11)) break;
    }

    sol.psi = phi;
    sol.effective_h = h_estimate;
    sol.residual = weak_kam_residual(problem, sol.psi, sol.effective_h);
    sol.policy = optimal_policy(problem, sol.psi);
    if (uniform_rate > 0.0 && sol.iterations >= budget &&
        sol.residual > 1e3 * cfg.tolerance) {
        throw ConvergenceError("relative_value_iteration: iteration budget exhausted",
                               sol.residual);
    }
    return sol;
}

double McShaneExtension::operator()(const TorusPoint& x) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values_.size(); ++i) {
        best = std::min(best, values_[i] + constant_ * wrap_distance(x, lattice_.node_point(i)));
    }
    return best;
}

double discrete_lipschitz_ratio(const Lattice& lat, const GridFunction& psi) {
    double worst = 0.0;
    double inv_h = static_cast<double>(lat.resolution);
    for (std::size_t i = 0; i < lat.node_count(); ++i) {
        for (int a = 0; a < lat.dim; ++a) {
            double gap = std::abs(psi[lat.neighbor_flat(i, a, +1)] - psi[i]) * inv_h;
            worst = std::max(worst, gap);
        }
    }
    return worst;
}

McShaneExtension mcshane_extend(const Lattice& lat, const GridFunction& psi, double lipschitz) {
    if (psi.size() != lat.node_count())
        throw std::invalid_argument("mcshane_extend: grid function size mismatch");
    // sqrt(d) converts the per-axis neighbor ratio into a pairwise constant,
    // so the extension always interpolates the lattice values.
    double needed = std::sqrt(static_cast<double>(lat.dim)) * discrete_lipschitz_ratio(lat, psi);
    return McShaneExtension(lat, psi, std::max(lipschitz, needed));
}

} // namespace kamgrid
