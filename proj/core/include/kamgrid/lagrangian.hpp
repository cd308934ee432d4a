#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kamgrid/lattice.hpp"

namespace kamgrid {

/// Cotangent (row) vector.
using Covector = std::vector<double>;

/// One term a_k cos(2 pi k.x) + b_k sin(2 pi k.x) of a trigonometric polynomial.
struct TrigTerm {
    std::vector<int> wave; // multi-index k
    double cos_coeff = 0.0;
    double sin_coeff = 0.0;
};

/// Periodic potential P on the torus: either a trigonometric polynomial
/// (exact gradient) or a tabulated grid with periodic linear interpolation
/// (gradient by central differences at the table resolution).
class Potential {
public:
    enum class Kind { trig_polynomial, tabulated };

    static Potential zero(int dim);
    static Potential trig(int dim, std::vector<TrigTerm> terms);
    static Potential tabulated(int dim, int table_resolution, std::vector<double> values);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    const std::vector<TrigTerm>& terms() const { return terms_; }
    int table_resolution() const { return table_resolution_; }
    const std::vector<double>& table() const { return table_; }

    double value(const TorusPoint& x) const;
    std::vector<double> gradient(const TorusPoint& x) const;

private:
    Potential() = default;
    Kind kind_ = Kind::trig_polynomial;
    int dim_ = 1;
    std::vector<TrigTerm> terms_;
    int table_resolution_ = 0;
    std::vector<double> table_;

    double table_value(std::span<const double> coords) const;
};

/// Per-axis kinetic term weight*|v_i|^exponent / exponent.
struct KineticAxis {
    double exponent = 2.0; // > 1
    double weight = 1.0;   // > 0
};

/// Declared search box |v_i| <= half_width[i] for black-box Lagrangians.
struct VelocityBox {
    std::vector<double> half_width;
};

/// Black-box running cost, convex in v.
using LagrangianHook =
    std::function<double(const TorusPoint& x, std::span<const double> v)>;

/// Running cost L(x,v) = sum_i weight_i |v_i|^{alpha_i}/alpha_i + P(x),
/// or an arbitrary convex-in-v hook with a declared velocity box.
struct LagrangianSpec {
    std::vector<KineticAxis> kinetic;
    Potential potential = Potential::zero(1);
    LagrangianHook generic_hook;          // optional
    std::optional<VelocityBox> hook_box;  // required when generic_hook is set

    int dim() const { return static_cast<int>(kinetic.size()); }
    bool separable() const { return !generic_hook; }
};

/// Convenience constructors for the common families.
LagrangianSpec quadratic_lagrangian(int dim, Potential potential);
LagrangianSpec power_lagrangian(std::vector<KineticAxis> kinetic, Potential potential);

double eval_L(const LagrangianSpec& spec, const TorusPoint& x, std::span<const double> v);

/// Legendre transform H(x,p) = max_v [pv - L(x,v)]; closed form for the
/// power-law family, coordinate-ascent maximization over the declared box
/// otherwise.
double eval_H_continuous(const LagrangianSpec& spec, const TorusPoint& x,
                         std::span<const double> p);

struct LatticeHamiltonianResult {
    double value = 0.0;
    Velocity argmax;
};

/// sup_v [xi.v - L(x,v)] with the maximizing velocity. Ties are broken
/// toward smaller |v|, then toward the positive direction.
LatticeHamiltonianResult lattice_hamiltonian(const LagrangianSpec& spec,
                                             const TorusPoint& x,
                                             const DiscreteGradient& xi);

/// Per-axis conjugate sup_{w>=0} [s w - weight w^alpha/alpha] with its argmax.
/// Building block shared by the lattice Hamiltonian and the solvers.
struct AxisConjugate {
    double value = 0.0;
    double speed = 0.0;
};
AxisConjugate axis_conjugate(double slope, const KineticAxis& axis);
/// Same supremum restricted to w in [0, cap].
AxisConjugate axis_conjugate_capped(double slope, const KineticAxis& axis, double cap);

/// A-priori bounds derived from the Lagrangian; diagnostics only, computed
/// from suprema sampled on a grid of the documented resolution.
struct DiagnosticConstants {
    double c0 = 0, c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0, c6 = 0;
    double min_potential = 0, max_potential = 0;
    double sup_grad_potential = 0;
    double unit_sphere_kinetic = 0; // max over |v|=1 of the kinetic part
    int dim = 1;
    std::vector<KineticAxis> kinetic;

    /// Superlinearity offset: L(x,v) >= a|v| + g(a).
    double g(double a) const;
    /// K(c) = sup over x, |v|<=c of |L_x(x,v)|.
    double K(double c) const;
};

DiagnosticConstants diagnostic_constants(const LagrangianSpec& spec,
                                         int sampling_resolution = 0);

} // namespace kamgrid
