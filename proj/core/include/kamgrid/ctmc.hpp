#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kamgrid/lattice.hpp"

namespace kamgrid {

/// One row of a Kolmogorov (rate) matrix: nonnegative off-diagonal rates to
/// axis neighbors; the diagonal is minus their sum and is never stored.
struct GeneratorRow {
    struct Entry {
        std::size_t neighbor;
        double rate;
    };
    std::size_t node = 0;
    std::vector<Entry> entries;

    double exit_rate() const {
        double s = 0.0;
        for (const auto& e : entries) s += e.rate;
        return s;
    }
    double diagonal() const { return -exit_rate(); }
};

/// Stationary feedback strategy: one velocity vector per node (row-major).
struct StationaryPolicy {
    int dim = 0;
    std::vector<double> velocities; // node_count * dim

    std::size_t node_count() const {
        return dim == 0 ? 0 : velocities.size() / static_cast<std::size_t>(dim);
    }
    std::span<const double> velocity(std::size_t node) const {
        return std::span<const double>(velocities.data() + node * static_cast<std::size_t>(dim),
                                       static_cast<std::size_t>(dim));
    }
    std::span<double> velocity(std::size_t node) {
        return std::span<double>(velocities.data() + node * static_cast<std::size_t>(dim),
                                 static_cast<std::size_t>(dim));
    }
    /// Largest Euclidean speed over nodes.
    double max_speed() const;

    static StationaryPolicy zero(int dim, std::size_t nodes) {
        return StationaryPolicy{dim, std::vector<double>(nodes * static_cast<std::size_t>(dim), 0.0)};
    }
};

/// Generator induced by a stationary feedback strategy: rate |v_i|/h to the
/// sgn(v_i) neighbor on each axis.
struct PolicyGenerator {
    const Lattice* lattice = nullptr;
    std::vector<GeneratorRow> rows;
    double max_exit_rate = 0.0;
};

GeneratorRow generator_row(const Lattice& lat, std::size_t flat, std::span<const double> v);
GeneratorRow generator_row(const Lattice& lat, const NodeIndex& idx, std::span<const double> v);

PolicyGenerator build_policy_generator(const Lattice& lat, const StationaryPolicy& policy);

/// (Q phi)(x) = sum_y Q_{x,y} phi(y); identical to pairing the discrete
/// gradient with the policy velocity at every node.
GridFunction apply_generator(const PolicyGenerator& gen, const GridFunction& phi);

/// Probability weights on the lattice; renormalized after numerical steps.
struct Distribution {
    std::vector<double> weights;

    double total() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
    void normalize();

    static Distribution uniform(std::size_t nodes) {
        return Distribution{std::vector<double>(nodes, 1.0 / static_cast<double>(nodes))};
    }
    static Distribution point_mass(std::size_t nodes, std::size_t at) {
        Distribution m{std::vector<double>(nodes, 0.0)};
        m.weights[at] = 1.0;
        return m;
    }
};

/// Row vector m Q; used for stationarity residuals.
std::vector<double> left_apply_generator(const PolicyGenerator& gen, const Distribution& m);

/// Forward Kolmogorov evolution m' = m Q over duration t by uniformization
/// (Poisson-weighted powers of I + Q/rate, truncated at mass 1 - 1e-12).
/// substeps = 0 splits the interval automatically when rate*t is large.
Distribution forward_evolve(const PolicyGenerator& gen, const Distribution& m0, double t,
                            int substeps = 0);

/// Stationary distribution m Q = 0: power iteration on the uniformized
/// operator from the uniform start (the documented selector when several
/// stationary distributions exist), refined by a direct solve of the
/// augmented balance system when that succeeds.
Distribution stationary_distribution(const PolicyGenerator& gen, double tol = 1e-10,
                                     int max_iterations = 200000);

/// max_y |(m Q)(y)|.
double stationarity_residual(const PolicyGenerator& gen, const Distribution& m);

} // namespace kamgrid
