#include "kamgrid/mather.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kamgrid/errors.hpp"
#include "kamgrid/rng.hpp"
#include "kamgrid/simplex.hpp"

namespace kamgrid {

double DiscreteMatherMeasure::mean_speed() const {
    double s = 0.0;
    for (const auto& a : atoms) {
        double sq = 0.0;
        for (double c : a.velocity) sq += c * c;
        s += a.weight * std::sqrt(sq);
    }
    return s;
}

DiscreteMatherMeasure mather_from_policy(const LatticeProblem& problem,
                                         const StationaryPolicy& policy) {
    PolicyGenerator gen = build_policy_generator(problem.lattice, policy);
    Distribution m = stationary_distribution(gen);
    DiscreteMatherMeasure mu;
    mu.atoms.reserve(m.weights.size());
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
        if (m.weights[i] == 0.0) continue;
        auto v = policy.velocity(i);
        mu.atoms.push_back({i, Velocity(v.begin(), v.end()), m.weights[i]});
    }
    return mu;
}

double action(const LatticeProblem& problem, const DiscreteMatherMeasure& mu) {
    double s = 0.0;
    for (const auto& a : mu.atoms) {
        s += a.weight * eval_L(problem.lagrangian, problem.lattice.node_point(a.node), a.velocity);
    }
    return s;
}

namespace {

double pairing_against(const LatticeProblem& problem, const DiscreteMatherMeasure& mu,
                       const GridFunction& phi) {
    double acc = 0.0;
    for (const auto& a : mu.atoms) {
        DiscreteGradient xi = discrete_gradient(problem.lattice, phi, a.node);
        acc += a.weight * pair_dot(xi, a.velocity);
    }
    return acc;
}

} // namespace

HolonomicReport holonomic_residual(const LatticeProblem& problem, const DiscreteMatherMeasure& mu,
                                   int n_random_tests, std::uint64_t seed) {
    if (n_random_tests < 1)
        throw std::invalid_argument("holonomic_residual: need at least one random test");
    const auto& lat = problem.lattice;
    double speed_norm = 1.0 + mu.mean_speed();
    HolonomicReport report;
    report.basis = "indicator+random";

    GridFunction phi(lat.node_count(), 0.0);
    for (std::size_t y = 0; y < lat.node_count(); ++y) {
        phi[y] = 1.0;
        report.residual = std::max(report.residual,
                                   std::abs(pairing_against(problem, mu, phi)) / speed_norm);
        phi[y] = 0.0;
        ++report.test_functions;
    }
    std::uint64_t state = seed;
    for (int t = 0; t < n_random_tests; ++t) {
        double sup = 0.0;
        for (auto& value : phi) {
            value = (splitmix64(state) >> 11) * 0x1.0p-52 - 1.0; // in [-1, 1)
            sup = std::max(sup, std::abs(value));
        }
        if (sup == 0.0) sup = 1.0;
        report.residual = std::max(
            report.residual, std::abs(pairing_against(problem, mu, phi)) / (sup * speed_norm));
        ++report.test_functions;
    }
    return report;
}

LpMatherResult lp_mather_oracle(const LatticeProblem& problem,
                                const std::vector<double>& per_axis_velocities,
                                const StationaryPolicy* augment_policy,
                                std::size_t max_variables) {
    const auto& lat = problem.lattice;
    const int d = lat.dim;
    const std::size_t n = lat.node_count();
    if (per_axis_velocities.empty())
        throw ConfigError("lp_mather_oracle: empty velocity grid");

    // Cartesian velocity set, shared by all nodes.
    std::size_t grid_size = 1;
    for (int a = 0; a < d; ++a) grid_size *= per_axis_velocities.size();
    std::vector<Velocity> grid(grid_size, Velocity(d, 0.0));
    for (std::size_t g = 0; g < grid_size; ++g) {
        std::size_t rem = g;
        for (int a = d - 1; a >= 0; --a) {
            grid[g][a] = per_axis_velocities[rem % per_axis_velocities.size()];
            rem /= per_axis_velocities.size();
        }
    }

    std::size_t per_node = grid_size + (augment_policy ? 1 : 0);
    std::size_t cols = n * per_node;
    if (cols > max_variables)
        throw ConfigError("lp_mather_oracle: velocity grid exceeds the size limit");

    // Rows: one balance equality per node except the last (their sum is zero
    // by the row sums of the generator), plus the normalization.
    std::size_t rows = n; // n-1 balance + 1 normalization
    LinearProgram lp;
    lp.rows = rows;
    lp.cols = cols;
    lp.matrix.assign(rows * cols, 0.0);
    lp.rhs.assign(rows, 0.0);
    lp.rhs[rows - 1] = 1.0;
    lp.cost.assign(cols, 0.0);

    auto velocity_of = [&](std::size_t x, std::size_t k) -> Velocity {
        if (k < grid_size) return grid[k];
        auto v = augment_policy->velocity(x);
        return Velocity(v.begin(), v.end());
    };

    for (std::size_t x = 0; x < n; ++x) {
        TorusPoint point = lat.node_point(x);
        for (std::size_t k = 0; k < per_node; ++k) {
            std::size_t col = x * per_node + k;
            Velocity v = velocity_of(x, k);
            lp.cost[col] = eval_L(problem.lagrangian, point, v);
            // Column of the balance block: the generator row of (x, v),
            // scattered into the equations indexed by target nodes.
            GeneratorRow row = generator_row(lat, x, v);
            double exit = row.exit_rate();
            if (x < n - 1) lp.at(x, col) -= exit;
            for (const auto& e : row.entries) {
                if (e.neighbor < n - 1) lp.at(e.neighbor, col) += e.rate;
            }
            lp.at(rows - 1, col) = 1.0;
        }
    }

    SimplexResult res = solve_lp(lp);
    if (res.status == SimplexResult::Status::infeasible)
        throw std::logic_error("lp_mather_oracle: infeasible program (zero-velocity measure "
                               "should always be feasible)");
    if (res.status != SimplexResult::Status::optimal)
        throw ConvergenceError("lp_mather_oracle: simplex did not reach optimality",
                               res.max_infeasibility);

    LpMatherResult out;
    out.value = res.objective;
    out.dual_residual = res.dual_residual;
    out.primal_residual = res.max_infeasibility;
    out.iterations = res.iterations;
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t k = 0; k < per_node; ++k) {
            double w = res.solution[x * per_node + k];
            if (w > 1e-14) out.measure.atoms.push_back({x, velocity_of(x, k), w});
        }
    }
    return out;
}

} // namespace kamgrid
