#include "kamgrid/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kamgrid {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kCostTol = 1e-9;

/// Tableau with an appended artificial block; basis tracked by column index.
struct Tableau {
    std::size_t m, n; // constraint rows, structural columns
    std::vector<double> a; // m x (n + m) coefficients, artificials last
    std::vector<double> b;
    std::vector<std::size_t> basis;

    double& at(std::size_t r, std::size_t c) { return a[r * (n + m) + c]; }

    void pivot(std::size_t row, std::size_t col) {
        const std::size_t w = n + m;
        double piv = at(row, col);
        double inv = 1.0 / piv;
        for (std::size_t c = 0; c < w; ++c) at(row, c) *= inv;
        b[row] *= inv;
        at(row, col) = 1.0;
        for (std::size_t r = 0; r < m; ++r) {
            if (r == row) continue;
            double f = at(r, col);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < w; ++c) at(r, c) -= f * at(row, c);
            at(r, col) = 0.0;
            b[r] -= f * b[row];
        }
        basis[row] = col;
    }
};

} // namespace

SimplexResult solve_lp(const LinearProgram& lp, long max_iterations) {
    if (lp.matrix.size() != lp.rows * lp.cols || lp.rhs.size() != lp.rows ||
        lp.cost.size() != lp.cols)
        throw std::invalid_argument("solve_lp: inconsistent program dimensions");

    const std::size_t m = lp.rows, n = lp.cols;
    if (max_iterations <= 0) max_iterations = 200 * static_cast<long>(m + n + 16);

    Tableau t;
    t.m = m;
    t.n = n;
    t.a.assign(m * (n + m), 0.0);
    t.b.resize(m);
    t.basis.resize(m);
    for (std::size_t r = 0; r < m; ++r) {
        double sign = lp.rhs[r] < 0.0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < n; ++c) t.at(r, c) = sign * lp.at(r, c);
        t.b[r] = sign * lp.rhs[r];
        t.at(r, n + r) = 1.0;
        t.basis[r] = n + r;
    }

    SimplexResult out;
    std::vector<double> reduced(n + m);

    auto run_phase = [&](const std::vector<double>& cost, bool allow_artificial) -> int {
        // cost over all n+m columns; returns 0 optimal, 1 unbounded, 2 limit
        while (true) {
            if (out.iterations++ > max_iterations) return 2;
            // reduced costs: c_j - c_B . B^{-1} A_j (tableau is already B^{-1} A)
            std::size_t enter = n + m;
            for (std::size_t c = 0; c < n + m; ++c) {
                if (!allow_artificial && c >= n) continue;
                double rc = cost[c];
                for (std::size_t r = 0; r < m; ++r) {
                    double cb = cost[t.basis[r]];
                    if (cb != 0.0) rc -= cb * t.at(r, c);
                }
                reduced[c] = rc;
                if (rc < -kCostTol && enter == n + m) {
                    enter = c; // Bland: first improving index
                    break;
                }
            }
            if (enter == n + m) return 0;
            std::size_t leave = m;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < m; ++r) {
                double col = t.at(r, enter);
                if (col > kPivotTol) {
                    double ratio = t.b[r] / col;
                    if (ratio < best_ratio - 1e-15 ||
                        (std::abs(ratio - best_ratio) <= 1e-15 &&
                         (leave == m || t.basis[r] < t.basis[leave]))) {
                        best_ratio = ratio;
                        leave = r;
                    }
                }
            }
            if (leave == m) return 1;
            t.pivot(leave, enter);
        }
    };

    // Phase 1: drive the artificial block out.
    std::vector<double> phase1_cost(n + m, 0.0);
    for (std::size_t r = 0; r < m; ++r) phase1_cost[n + r] = 1.0;
    int rc = run_phase(phase1_cost, true);
    if (rc == 2) {
        out.status = SimplexResult::Status::iteration_limit;
        return out;
    }
    double art_sum = 0.0;
    for (std::size_t r = 0; r < m; ++r)
        if (t.basis[r] >= n) art_sum += t.b[r];
    if (rc == 1 || art_sum > 1e-7) {
        out.status = SimplexResult::Status::infeasible;
        out.max_infeasibility = art_sum;
        return out;
    }
    // Pivot residual artificials out of the basis where possible.
    for (std::size_t r = 0; r < m; ++r) {
        if (t.basis[r] < n) continue;
        std::size_t enter = n;
        for (std::size_t c = 0; c < n; ++c) {
            if (std::abs(t.at(r, c)) > kPivotTol) {
                enter = c;
                break;
            }
        }
        if (enter < n) t.pivot(r, enter);
        // otherwise the row is redundant; the artificial stays basic at zero
    }

    std::vector<double> phase2_cost(n + m, 0.0);
    for (std::size_t c = 0; c < n; ++c) phase2_cost[c] = lp.cost[c];
    rc = run_phase(phase2_cost, false);
    if (rc == 2) {
        out.status = SimplexResult::Status::iteration_limit;
        return out;
    }
    if (rc == 1) {
        out.status = SimplexResult::Status::unbounded;
        return out;
    }

    out.solution.assign(n, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        if (t.basis[r] < n) out.solution[t.basis[r]] = t.b[r];
    }
    out.objective = 0.0;
    for (std::size_t c = 0; c < n; ++c) out.objective += lp.cost[c] * out.solution[c];
    for (std::size_t r = 0; r < m; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < n; ++c) acc += lp.at(r, c) * out.solution[c];
        out.max_infeasibility = std::max(out.max_infeasibility, std::abs(acc - lp.rhs[r]));
    }
    double worst_rc = 0.0;
    for (std::size_t c = 0; c < n; ++c) worst_rc = std::min(worst_rc, reduced[c]);
    out.dual_residual = -worst_rc;
    out.status = SimplexResult::Status::optimal;
    return out;
}

} // namespace kamgrid
