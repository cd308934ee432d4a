#include "kamgrid/ctmc.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "kamgrid/errors.hpp"

namespace kamgrid {

double StationaryPolicy::max_speed() const {
    double best = 0.0;
    for (std::size_t i = 0; i < node_count(); ++i) {
        auto v = velocity(i);
        double sq = 0.0;
        for (double c : v) sq += c * c;
        best = std::max(best, sq);
    }
    return std::sqrt(best);
}

GeneratorRow generator_row(const Lattice& lat, std::size_t flat, std::span<const double> v) {
    if (static_cast<int>(v.size()) != lat.dim)
        throw std::invalid_argument("generator_row: velocity arity mismatch");
    GeneratorRow row;
    row.node = flat;
    double inv_h = static_cast<double>(lat.resolution);
    for (int a = 0; a < lat.dim; ++a) {
        if (v[a] == 0.0) continue;
        int dir = v[a] > 0.0 ? +1 : -1;
        double rate = inv_h * std::abs(v[a]);
        if (!(rate >= 0.0) || !std::isfinite(rate))
            throw std::invalid_argument("generator_row: rate must be finite and nonnegative");
        row.entries.push_back({lat.neighbor_flat(flat, a, dir), rate});
    }
    return row;
}

GeneratorRow generator_row(const Lattice& lat, const NodeIndex& idx, std::span<const double> v) {
    return generator_row(lat, lat.flat_index(idx), v);
}

PolicyGenerator build_policy_generator(const Lattice& lat, const StationaryPolicy& policy) {
    if (policy.dim != lat.dim || policy.node_count() != lat.node_count())
        throw std::invalid_argument("build_policy_generator: policy shape mismatch");
    PolicyGenerator gen;
    gen.lattice = &lat;
    gen.rows.reserve(lat.node_count());
    for (std::size_t i = 0; i < lat.node_count(); ++i) {
        gen.rows.push_back(generator_row(lat, i, policy.velocity(i)));
        gen.max_exit_rate = std::max(gen.max_exit_rate, gen.rows.back().exit_rate());
    }
    return gen;
}

GridFunction apply_generator(const PolicyGenerator& gen, const GridFunction& phi) {
    if (phi.size() != gen.rows.size())
        throw std::invalid_argument("apply_generator: shape mismatch");
    GridFunction out(phi.size(), 0.0);
    for (std::size_t i = 0; i < gen.rows.size(); ++i) {
        double acc = 0.0;
        for (const auto& e : gen.rows[i].entries) acc += e.rate * (phi[e.neighbor] - phi[i]);
        out[i] = acc;
    }
    return out;
}

void Distribution::normalize() {
    double s = 0.0;
    for (double& w : weights) {
        if (w < 0.0) w = 0.0;
        s += w;
    }
    if (s <= 0.0) throw std::invalid_argument("Distribution::normalize: vanishing total mass");
    for (double& w : weights) w /= s;
}

std::vector<double> left_apply_generator(const PolicyGenerator& gen, const Distribution& m) {
    std::vector<double> out(m.weights.size(), 0.0);
    for (std::size_t i = 0; i < gen.rows.size(); ++i) {
        double mi = m.weights[i];
        if (mi == 0.0) continue;
        for (const auto& e : gen.rows[i].entries) {
            out[e.neighbor] += mi * e.rate;
            out[i] -= mi * e.rate;
        }
    }
    return out;
}

double stationarity_residual(const PolicyGenerator& gen, const Distribution& m) {
    auto flow = left_apply_generator(gen, m);
    double worst = 0.0;
    for (double f : flow) worst = std::max(worst, std::abs(f));
    return worst;
}

namespace {

/// One application of the uniformized transition operator: m (I + Q/rate).
void uniformized_step(const PolicyGenerator& gen, double rate, const std::vector<double>& in,
                      std::vector<double>& out) {
    out.assign(in.size(), 0.0);
    for (std::size_t i = 0; i < gen.rows.size(); ++i) {
        double mi = in[i];
        if (mi == 0.0) continue;
        double exit = gen.rows[i].exit_rate();
        out[i] += mi * (1.0 - exit / rate);
        for (const auto& e : gen.rows[i].entries) out[e.neighbor] += mi * e.rate / rate;
    }
}

} // namespace

Distribution forward_evolve(const PolicyGenerator& gen, const Distribution& m0, double t,
                            int substeps) {
    if (t < 0.0) throw std::invalid_argument("forward_evolve: negative duration");
    if (m0.weights.size() != gen.rows.size())
        throw std::invalid_argument("forward_evolve: shape mismatch");
    double rate = gen.max_exit_rate;
    Distribution m = m0;
    m.normalize();
    if (rate == 0.0 || t == 0.0) return m;

    if (substeps <= 0) substeps = std::max(1, static_cast<int>(std::ceil(rate * t / 600.0)));
    double dt = t / substeps;
    std::vector<double> cur, next, acc;
    for (int s = 0; s < substeps; ++s) {
        double q = rate * dt;
        double log_w = -q; // log Poisson(0)
        cur = m.weights;
        acc.assign(cur.size(), 0.0);
        double covered = 0.0;
        for (int k = 0;; ++k) {
            double w = std::exp(log_w);
            for (std::size_t i = 0; i < cur.size(); ++i) acc[i] += w * cur[i];
            covered += w;
            if (covered >= 1.0 - 1e-12 && k >= static_cast<int>(q)) break;
            if (k > 1000000) break;
            uniformized_step(gen, rate, cur, next);
            cur.swap(next);
            log_w += std::log(q) - std::log(static_cast<double>(k + 1));
        }
        m.weights = acc;
        m.normalize(); // compensates the truncated Poisson tail
    }
    return m;
}

namespace {

/// Direct solve of the balance system with the normalization row substituted
/// for the last balance equation. Succeeds only for irreducible chains.
bool stationary_direct(const PolicyGenerator& gen, Distribution& refined) {
    const auto n = static_cast<Eigen::Index>(gen.rows.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(gen.rows.size() * 4);
    for (std::size_t i = 0; i < gen.rows.size(); ++i) {
        double exit = gen.rows[i].exit_rate();
        // balance equation for node y (row y): sum_x m_x Q_{x,y} = 0
        if (exit != 0.0) {
            for (const auto& e : gen.rows[i].entries) {
                if (static_cast<Eigen::Index>(e.neighbor) != n - 1)
                    trip.emplace_back(static_cast<int>(e.neighbor), static_cast<int>(i), e.rate);
            }
            if (static_cast<Eigen::Index>(i) != n - 1)
                trip.emplace_back(static_cast<int>(i), static_cast<int>(i), -exit);
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) trip.emplace_back(static_cast<int>(n - 1), static_cast<int>(i), 1.0);

    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success) return false;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b[n - 1] = 1.0;
    Eigen::VectorXd m = lu.solve(b);
    if (lu.info() != Eigen::Success) return false;
    double neg = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) neg = std::min(neg, m[i]);
    if (neg < -1e-8) return false;
    refined.weights.assign(m.data(), m.data() + n);
    for (double& w : refined.weights) w = std::max(w, 0.0);
    refined.normalize();
    return true;
}

} // namespace

Distribution stationary_distribution(const PolicyGenerator& gen, double tol, int max_iterations) {
    const std::size_t n = gen.rows.size();
    Distribution m = Distribution::uniform(n);
    double rate = gen.max_exit_rate;
    if (rate == 0.0) return m; // every distribution is stationary; uniform is the fixed point

    double target = tol * rate;
    std::vector<double> next;
    double residual = stationarity_residual(gen, m);
    int it = 0;
    while (residual > target && it < max_iterations) {
        int burst = 64;
        for (int k = 0; k < burst && it < max_iterations; ++k, ++it) {
            uniformized_step(gen, rate, m.weights, next);
            m.weights.swap(next);
        }
        m.normalize();
        residual = stationarity_residual(gen, m);
    }

    Distribution refined;
    if (stationary_direct(gen, refined)) {
        double refined_residual = stationarity_residual(gen, refined);
        if (refined_residual < residual) {
            m = refined;
            residual = refined_residual;
        }
    }
    if (residual > target)
        throw ConvergenceError("stationary_distribution: residual above tolerance", residual);
    return m;
}

} // namespace kamgrid
