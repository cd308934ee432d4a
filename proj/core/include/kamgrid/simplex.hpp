#pragma once

#include <cstddef>
#include <vector>

namespace kamgrid {

/// Equality-form linear program: minimize c.w subject to A w = b, w >= 0.
/// A is row-major, rows x cols.
struct LinearProgram {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> matrix;
    std::vector<double> rhs;
    std::vector<double> cost;

    double& at(std::size_t r, std::size_t c) { return matrix[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return matrix[r * cols + c]; }
};

struct SimplexResult {
    enum class Status { optimal, infeasible, unbounded, iteration_limit };
    Status status = Status::iteration_limit;
    double objective = 0.0;
    std::vector<double> solution;
    double max_infeasibility = 0.0; // max |A w - b| at exit
    double dual_residual = 0.0;     // most negative reduced cost, flipped sign
    long iterations = 0;
};

/// Dense two-phase simplex with Bland's rule (anti-cycling). Suitable for
/// the small programs produced here (tens of rows, a few thousand columns).
SimplexResult solve_lp(const LinearProgram& lp, long max_iterations = 0);

} // namespace kamgrid
