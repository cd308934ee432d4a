#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace kamgrid {

/// Grid function phi: one real per lattice node, row-major over integer indices.
using GridFunction = std::vector<double>;

/// Velocity (tangent) vector; column orientation.
using Velocity = std::vector<double>;

/// Integer lattice index, each entry in {0,...,N-1}.
using NodeIndex = std::vector<int>;

/// Point on the flat torus, canonical representative with coords in [0,1).
struct TorusPoint {
    std::vector<double> coords;

    TorusPoint() = default;
    explicit TorusPoint(std::vector<double> c) : coords(std::move(c)) {}

    int dim() const { return static_cast<int>(coords.size()); }
};

/// Canonicalize an arbitrary representative into [0,1)^d. Idempotent.
TorusPoint canonical(std::vector<double> raw);

/// Torus metric: minimum over integer shifts in {-1,0,1}^d of the Euclidean
/// norm of x - y + n. Throws std::invalid_argument on dimension mismatch.
double wrap_distance(const TorusPoint& x, const TorusPoint& y);

/// Displacement vector delta with x + delta ~ y (mod 1) and |delta| equal to
/// wrap_distance(x, y). Used to pick lifts with minimal initial separation.
std::vector<double> wrap_displacement(const TorusPoint& x, const TorusPoint& y);

/// Regular lattice (h Z^d)/Z^d with h = 1/N. Index arithmetic is exact:
/// indices are integers mod N, coordinates are recomputed as idx*h on demand.
struct Lattice {
    Lattice(int dim, int resolution);

    int dim;
    int resolution;
    double spacing; // 1/N, stored for convenience

    std::size_t node_count() const { return count_; }

    std::size_t flat_index(const NodeIndex& idx) const;
    NodeIndex node_index(std::size_t flat) const;

    TorusPoint node_point(std::size_t flat) const;
    TorusPoint node_point(const NodeIndex& idx) const;

    /// Neighbor one step along `axis` (0-based) in direction dir = +1/-1,
    /// wrapping modulo N.
    std::size_t neighbor_flat(std::size_t flat, int axis, int dir) const;

private:
    std::size_t count_;
    std::vector<std::size_t> strides_;
};

/// Wrap-around neighbor of an integer index. axis is 0-based, dir = +1/-1.
NodeIndex neighbor(const Lattice& lat, const NodeIndex& idx, int axis, int dir);

/// The d pairs (forward, backward) of one-sided difference quotients at a node.
struct DiscreteGradient {
    std::vector<std::pair<double, double>> pairs; // (forward, backward) per axis

    int dim() const { return static_cast<int>(pairs.size()); }
    double forward(int axis) const { return pairs[axis].first; }
    double backward(int axis) const { return pairs[axis].second; }
};

/// Forward/backward difference pairs of phi at node i, with wrap-around.
DiscreteGradient discrete_gradient(const Lattice& lat, const GridFunction& phi,
                                   std::size_t flat);
DiscreteGradient discrete_gradient(const Lattice& lat, const GridFunction& phi,
                                   const NodeIndex& idx);

/// Pairing xi . v = sum_i [xi_i^+ max(v_i,0) + xi_i^- max(-v_i,0)].
double pair_dot(const DiscreteGradient& xi, std::span<const double> v);

} // namespace kamgrid
