#include "kamgrid/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kamgrid/rng.hpp"

namespace kamgrid {

SimStrategy SimStrategy::from_policy(const StationaryPolicy& policy) {
    SimStrategy s;
    StationaryPolicy copy = policy;
    s.bound = copy.max_speed();
    s.velocity = [copy = std::move(copy)](double, std::size_t node) {
        auto v = copy.velocity(node);
        return Velocity(v.begin(), v.end());
    };
    return s;
}

SimStrategy SimStrategy::constant(Velocity v) {
    SimStrategy s;
    double sq = 0.0;
    for (double c : v) sq += c * c;
    s.bound = std::sqrt(sq);
    s.velocity = [v = std::move(v)](double, std::size_t) { return v; };
    return s;
}

namespace {

std::size_t locate_segment(const std::vector<double>& times, double t) {
    // Largest k with times[k] <= t.
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return 0;
    return static_cast<std::size_t>(it - times.begin()) - 1;
}

} // namespace

std::vector<double> CoupledPath::chain_lift_at(double t) const {
    std::size_t k = locate_segment(times, t);
    return std::vector<double>(chain_lift.begin() + static_cast<long>(k * dim),
                               chain_lift.begin() + static_cast<long>((k + 1) * dim));
}

std::vector<double> CoupledPath::flow_lift_at(double t) const {
    std::size_t k = locate_segment(times, t);
    std::vector<double> x(flow_lift.begin() + static_cast<long>(k * dim),
                          flow_lift.begin() + static_cast<long>((k + 1) * dim));
    if (k + 1 < times.size()) {
        // interpolate the linear segment toward the next event
        double span = times[k + 1] - times[k];
        if (span > 0.0) {
            double f = (t - times[k]) / span;
            for (int a = 0; a < dim; ++a) {
                double next = flow_lift[(k + 1) * dim + a];
                x[a] += f * (next - x[a]);
            }
        }
    }
    return x;
}

TorusPoint CoupledPath::chain_point_at(double t) const { return canonical(chain_lift_at(t)); }
TorusPoint CoupledPath::flow_point_at(double t) const { return canonical(flow_lift_at(t)); }

std::size_t CoupledPath::node_at(double t) const { return nodes[locate_segment(times, t)]; }

CoupledPath simulate_chain(const LatticeProblem& problem, const SimStrategy& strategy,
                           std::size_t start_node, double horizon, std::uint64_t seed,
                           const std::vector<double>* flow_start) {
    const auto& lat = problem.lattice;
    if (!strategy.velocity) throw std::invalid_argument("simulate_chain: empty strategy");
    if (horizon < 0.0) throw std::invalid_argument("simulate_chain: negative horizon");

    CoupledPath path;
    path.dim = lat.dim;
    std::size_t node = start_node;
    TorusPoint start_point = lat.node_point(node);
    std::vector<double> chain = start_point.coords;
    std::vector<double> flow = flow_start ? *flow_start : chain;
    if (static_cast<int>(flow.size()) != lat.dim)
        throw std::invalid_argument("simulate_chain: flow start arity mismatch");

    auto record = [&](double t) {
        path.times.push_back(t);
        path.nodes.push_back(node);
        path.chain_lift.insert(path.chain_lift.end(), chain.begin(), chain.end());
        path.flow_lift.insert(path.flow_lift.end(), flow.begin(), flow.end());
    };

    SampleRng rng(seed, 0);
    double t = 0.0;
    record(t);
    const double h = lat.spacing;
    std::vector<double> rates(lat.dim);
    while (t < horizon) {
        Velocity v = strategy.velocity(t, node);
        if (static_cast<int>(v.size()) != lat.dim)
            throw std::invalid_argument("simulate_chain: strategy arity mismatch");
        double speed_sq = 0.0, total_rate = 0.0;
        for (int a = 0; a < lat.dim; ++a) {
            speed_sq += v[a] * v[a];
            rates[a] = std::abs(v[a]) / h;
            total_rate += rates[a];
        }
        if (std::sqrt(speed_sq) > strategy.bound * (1.0 + 1e-12) + 1e-300)
            throw std::invalid_argument("simulate_chain: strategy exceeds its declared bound");

        double dwell = total_rate > 0.0 ? rng.exponential(total_rate)
                                        : std::numeric_limits<double>::infinity();
        double t_next = t + dwell;
        if (t_next >= horizon) {
            for (int a = 0; a < lat.dim; ++a) flow[a] += v[a] * (horizon - t);
            t = horizon;
            record(t);
            break;
        }
        for (int a = 0; a < lat.dim; ++a) flow[a] += v[a] * dwell;
        std::size_t axis = rng.pick(rates.data(), rates.size(), total_rate);
        int dir = v[axis] > 0.0 ? +1 : -1;
        chain[axis] += dir * h;
        node = lat.neighbor_flat(node, static_cast<int>(axis), dir);
        t = t_next;
        record(t);
    }
    return path;
}

CouplingReport estimate_coupling_gap(const LatticeProblem& problem, const SimStrategy& strategy,
                                     const TorusPoint& flow_start, const NodeIndex& chain_start,
                                     const std::vector<double>& times, const SimConfig& cfg) {
    const auto& lat = problem.lattice;
    std::size_t start_flat = lat.flat_index(chain_start);
    TorusPoint chain_point = lat.node_point(start_flat);

    // Lift the flow so the initial lift distance equals the torus distance.
    std::vector<double> delta = wrap_displacement(chain_point, flow_start);
    std::vector<double> flow_lift0 = chain_point.coords;
    double init_dist_sq = 0.0;
    for (int a = 0; a < lat.dim; ++a) {
        flow_lift0[a] += delta[a];
        init_dist_sq += delta[a] * delta[a];
    }
    double init_dist = std::sqrt(init_dist_sq);

    double horizon = cfg.horizon;
    for (double t : times) horizon = std::max(horizon, t);

    CouplingReport report;
    report.times = times;
    report.samples = cfg.samples;
    report.seed = cfg.seed;
    std::vector<double> sum(times.size(), 0.0), sum_sq(times.size(), 0.0);

    for (int s = 0; s < cfg.samples; ++s) {
        std::uint64_t sample_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(s));
        CoupledPath path =
            simulate_chain(problem, strategy, start_flat, horizon, sample_seed, &flow_lift0);
        for (std::size_t k = 0; k < times.size(); ++k) {
            auto xc = path.chain_lift_at(times[k]);
            auto xf = path.flow_lift_at(times[k]);
            double gap_sq = 0.0;
            for (int a = 0; a < lat.dim; ++a) {
                double diff = xf[a] - xc[a];
                gap_sq += diff * diff;
            }
            sum[k] += gap_sq;
            sum_sq[k] += gap_sq * gap_sq;
        }
    }

    double root_d = std::sqrt(static_cast<double>(lat.dim));
    double rate_term = root_d * strategy.bound / lat.resolution;
    for (std::size_t k = 0; k < times.size(); ++k) {
        double mean = sum[k] / cfg.samples;
        double var = cfg.samples > 1
                         ? std::max(0.0, (sum_sq[k] - cfg.samples * mean * mean) /
                                             (cfg.samples - 1.0))
                         : 0.0;
        double se = std::sqrt(var / cfg.samples);
        double bound = init_dist + rate_term * times[k];
        report.mean_square_gap.push_back(mean);
        report.standard_error.push_back(se);
        report.bound.push_back(bound);
        report.bound_squared_start.push_back(init_dist_sq + rate_term * times[k]);
        report.pass.push_back(mean <= bound + 3.0 * se);
    }
    return report;
}

DiscountedCostEstimate estimate_discounted_cost(const LatticeProblem& problem,
                                                const SimStrategy& strategy,
                                                std::size_t start_node, double discount,
                                                const SimConfig& cfg) {
    if (discount <= 0.0)
        throw std::invalid_argument("estimate_discounted_cost: discount must be positive");
    const auto& lat = problem.lattice;
    double horizon = cfg.horizon;

    // Analytic tail bound: |L| is bounded on |v| <= declared bound.
    double sup_abs_L;
    {
        DiagnosticConstants c = diagnostic_constants(problem.lagrangian);
        double kin = 0.0;
        for (const auto& ax : problem.lagrangian.kinetic)
            kin += ax.weight * std::pow(strategy.bound, ax.exponent) / ax.exponent;
        sup_abs_L = std::max(std::abs(c.max_potential + kin), std::abs(c.min_potential));
    }
    double tail = std::exp(-discount * horizon) * sup_abs_L / discount;

    double sum = 0.0, sum_sq = 0.0;
    for (int s = 0; s < cfg.samples; ++s) {
        std::uint64_t sample_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(s));
        CoupledPath path = simulate_chain(problem, strategy, start_node, horizon, sample_seed);
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < path.times.size(); ++k) {
            double t0 = path.times[k], t1 = path.times[k + 1];
            Velocity v = strategy.velocity(t0, path.nodes[k]);
            double running =
                eval_L(problem.lagrangian, lat.node_point(path.nodes[k]), v);
            acc += running * (std::exp(-discount * t0) - std::exp(-discount * t1)) / discount;
        }
        sum += acc;
        sum_sq += acc * acc;
    }

    DiscountedCostEstimate out;
    out.samples = cfg.samples;
    out.horizon = horizon;
    out.truncation_bound = tail;
    out.estimate = sum / cfg.samples;
    double var = cfg.samples > 1
                     ? std::max(0.0, (sum_sq - cfg.samples * out.estimate * out.estimate) /
                                         (cfg.samples - 1.0))
                     : 0.0;
    out.standard_error = std::sqrt(var / cfg.samples);
    return out;
}

} // namespace kamgrid
