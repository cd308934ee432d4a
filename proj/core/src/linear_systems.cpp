#include "kamgrid/linear_systems.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace kamgrid {

namespace {

Eigen::SparseMatrix<double> resolvent_matrix(const PolicyGenerator& gen, double discount) {
    const auto n = static_cast<Eigen::Index>(gen.rows.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(gen.rows.size() * 4);
    for (std::size_t i = 0; i < gen.rows.size(); ++i) {
        trip.emplace_back(static_cast<int>(i), static_cast<int>(i),
                          discount + gen.rows[i].exit_rate());
        for (const auto& e : gen.rows[i].entries)
            trip.emplace_back(static_cast<int>(i), static_cast<int>(e.neighbor), -e.rate);
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    return A;
}

} // namespace

double resolvent_residual(const PolicyGenerator& gen, double discount, const GridFunction& rhs,
                          const GridFunction& phi) {
    double worst = 0.0;
    for (std::size_t i = 0; i < gen.rows.size(); ++i) {
        double row = (discount + gen.rows[i].exit_rate()) * phi[i];
        for (const auto& e : gen.rows[i].entries) row -= e.rate * phi[e.neighbor];
        worst = std::max(worst, std::abs(row - rhs[i]));
    }
    return worst;
}

GridFunction solve_resolvent(const PolicyGenerator& gen, double discount,
                             const GridFunction& rhs) {
    if (discount <= 0.0)
        throw std::invalid_argument("solve_resolvent: discount must be positive");
    const auto n = static_cast<Eigen::Index>(gen.rows.size());
    Eigen::SparseMatrix<double> A = resolvent_matrix(gen, discount);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("solve_resolvent: factorization failed");

    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
    Eigen::VectorXd x = lu.solve(b);

    // One refinement pass; the resolvent is ill-conditioned for tiny
    // discounts and this keeps the residual at rounding level.
    for (int pass = 0; pass < 2; ++pass) {
        Eigen::VectorXd r = b - A * x;
        if (r.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + b.lpNorm<Eigen::Infinity>())) break;
        x += lu.solve(r);
    }

    return GridFunction(x.data(), x.data() + n);
}

double gauss_seidel_resolvent(const PolicyGenerator& gen, double discount,
                              const GridFunction& rhs, GridFunction& phi, int sweeps) {
    const std::size_t n = gen.rows.size();
    if (phi.size() != n) phi.assign(n, 0.0);
    for (int s = 0; s < sweeps; ++s) {
        for (std::size_t i = 0; i < n; ++i) {
            double offdiag = 0.0;
            for (const auto& e : gen.rows[i].entries) offdiag += e.rate * phi[e.neighbor];
            phi[i] = (rhs[i] + offdiag) / (discount + gen.rows[i].exit_rate());
        }
    }
    return resolvent_residual(gen, discount, rhs, phi);
}

ErgodicEvaluation solve_ergodic_evaluation(const PolicyGenerator& gen,
                                           const GridFunction& running_cost,
                                           std::size_t anchor) {
    ErgodicEvaluation out;
    const auto n = static_cast<Eigen::Index>(gen.rows.size());
    if (running_cost.size() != gen.rows.size()) return out;

    // Unknowns: psi (n entries, psi[anchor] pinned by an extra equation) and
    // the gain. Equations: Q psi + gain = -running_cost, psi[anchor] = 0.
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(gen.rows.size() * 5 + 2);
    for (std::size_t i = 0; i < gen.rows.size(); ++i) {
        double exit = gen.rows[i].exit_rate();
        trip.emplace_back(static_cast<int>(i), static_cast<int>(i), -exit);
        for (const auto& e : gen.rows[i].entries)
            trip.emplace_back(static_cast<int>(i), static_cast<int>(e.neighbor), e.rate);
        trip.emplace_back(static_cast<int>(i), static_cast<int>(n), 1.0);
    }
    trip.emplace_back(static_cast<int>(n), static_cast<int>(anchor), 1.0);

    Eigen::SparseMatrix<double> A(n + 1, n + 1);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success) return out;

    Eigen::VectorXd b(n + 1);
    for (Eigen::Index i = 0; i < n; ++i) b[i] = -running_cost[i];
    b[n] = 0.0;
    Eigen::VectorXd x = lu.solve(b);
    if (lu.info() != Eigen::Success) return out;
    for (int pass = 0; pass < 2; ++pass) {
        Eigen::VectorXd r = b - A * x;
        if (r.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + b.lpNorm<Eigen::Infinity>())) break;
        x += lu.solve(r);
    }

    // Reject blatantly inconsistent solves (multichain generators).
    Eigen::VectorXd r = b - A * x;
    double scale = 1.0 + b.lpNorm<Eigen::Infinity>() + x.lpNorm<Eigen::Infinity>();
    if (!x.allFinite() || r.lpNorm<Eigen::Infinity>() > 1e-8 * scale) return out;

    out.relative_value.assign(x.data(), x.data() + n);
    out.gain = x[n];
    out.solved = true;
    return out;
}

} // namespace kamgrid
