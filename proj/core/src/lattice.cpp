#include "kamgrid/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace kamgrid {

TorusPoint canonical(std::vector<double> raw) {
    for (double& c : raw) {
        c -= std::floor(c);
        if (c >= 1.0) c = 0.0; // floor rounding at the seam
    }
    return TorusPoint(std::move(raw));
}

double wrap_distance(const TorusPoint& x, const TorusPoint& y) {
    if (x.dim() != y.dim())
        throw std::invalid_argument("wrap_distance: dimension mismatch");
    // Canonical coordinates differ by less than 1 per axis, so shifts in
    // {-1,0,1} suffice; the minimum factors per axis.
    double sq = 0.0;
    for (int i = 0; i < x.dim(); ++i) {
        double best = std::abs(x.coords[i] - y.coords[i]);
        for (int n = -1; n <= 1; n += 2) {
            best = std::min(best, std::abs(x.coords[i] - y.coords[i] + n));
        }
        sq += best * best;
    }
    return std::sqrt(sq);
}

std::vector<double> wrap_displacement(const TorusPoint& x, const TorusPoint& y) {
    if (x.dim() != y.dim())
        throw std::invalid_argument("wrap_displacement: dimension mismatch");
    std::vector<double> delta(x.dim());
    for (int i = 0; i < x.dim(); ++i) {
        double best = y.coords[i] - x.coords[i];
        for (int n = -1; n <= 1; n += 2) {
            double cand = y.coords[i] - x.coords[i] + n;
            if (std::abs(cand) < std::abs(best)) best = cand;
        }
        delta[i] = best;
    }
    return delta;
}

Lattice::Lattice(int dim_, int resolution_)
    : dim(dim_), resolution(resolution_), spacing(1.0 / resolution_) {
    if (dim < 1) throw std::invalid_argument("Lattice: dimension must be >= 1");
    if (resolution < 2) throw std::invalid_argument("Lattice: resolution must be >= 2");
    strides_.assign(dim, 1);
    for (int a = dim - 2; a >= 0; --a) {
        strides_[a] = strides_[a + 1] * static_cast<std::size_t>(resolution);
    }
    count_ = strides_[0] * static_cast<std::size_t>(resolution);
}

std::size_t Lattice::flat_index(const NodeIndex& idx) const {
    if (static_cast<int>(idx.size()) != dim)
        throw std::invalid_argument("flat_index: dimension mismatch");
    std::size_t f = 0;
    for (int a = 0; a < dim; ++a) {
        int k = idx[a];
        if (k < 0 || k >= resolution)
            throw std::invalid_argument("flat_index: index out of range");
        f += strides_[a] * static_cast<std::size_t>(k);
    }
    return f;
}

NodeIndex Lattice::node_index(std::size_t flat) const {
    NodeIndex idx(dim);
    for (int a = 0; a < dim; ++a) {
        idx[a] = static_cast<int>(flat / strides_[a]);
        flat %= strides_[a];
    }
    return idx;
}

TorusPoint Lattice::node_point(std::size_t flat) const {
    std::vector<double> coords(dim);
    for (int a = 0; a < dim; ++a) {
        coords[a] = static_cast<double>(flat / strides_[a]) * spacing;
        flat %= strides_[a];
    }
    return TorusPoint(std::move(coords));
}

TorusPoint Lattice::node_point(const NodeIndex& idx) const {
    return node_point(flat_index(idx));
}

std::size_t Lattice::neighbor_flat(std::size_t flat, int axis, int dir) const {
    std::size_t s = strides_[axis];
    int k = static_cast<int>((flat / s) % static_cast<std::size_t>(resolution));
    int k2 = k + dir;
    if (k2 < 0) k2 += resolution;
    if (k2 >= resolution) k2 -= resolution;
    return flat + (static_cast<std::size_t>(k2) - static_cast<std::size_t>(k)) * s;
}

NodeIndex neighbor(const Lattice& lat, const NodeIndex& idx, int axis, int dir) {
    if (axis < 0 || axis >= lat.dim)
        throw std::invalid_argument("neighbor: axis out of range");
    NodeIndex out = idx;
    int k = out[axis] + dir;
    k %= lat.resolution;
    if (k < 0) k += lat.resolution;
    out[axis] = k;
    return out;
}

DiscreteGradient discrete_gradient(const Lattice& lat, const GridFunction& phi,
                                   std::size_t flat) {
    if (phi.size() != lat.node_count())
        throw std::invalid_argument("discrete_gradient: grid function size mismatch");
    DiscreteGradient g;
    g.pairs.resize(lat.dim);
    double inv_h = static_cast<double>(lat.resolution);
    double center = phi[flat];
    for (int a = 0; a < lat.dim; ++a) {
        double fwd = (phi[lat.neighbor_flat(flat, a, +1)] - center) * inv_h;
        double bwd = (phi[lat.neighbor_flat(flat, a, -1)] - center) * inv_h;
        g.pairs[a] = {fwd, bwd};
    }
    return g;
}

DiscreteGradient discrete_gradient(const Lattice& lat, const GridFunction& phi,
                                   const NodeIndex& idx) {
    return discrete_gradient(lat, phi, lat.flat_index(idx));
}

double pair_dot(const DiscreteGradient& xi, std::span<const double> v) {
    if (xi.dim() != static_cast<int>(v.size()))
        throw std::invalid_argument("pair_dot: arity mismatch");
    double s = 0.0;
    for (int a = 0; a < xi.dim(); ++a) {
        double vp = v[a] > 0.0 ? v[a] : 0.0;
        double vm = v[a] < 0.0 ? -v[a] : 0.0;
        s += xi.pairs[a].first * vp + xi.pairs[a].second * vm;
    }
    return s;
}

} // namespace kamgrid
