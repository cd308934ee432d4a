#include "kamgrid/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kamgrid/errors.hpp"
#include "kamgrid/rng.hpp"

namespace kamgrid {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct ScalarMax {
    double arg = 0.0;
    double value = 0.0;
};

ScalarMax golden_max(const std::function<double(double)>& f, double lo, double hi) {
    const double gr = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < 200 && (b - a) > 1e-13 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2; f1 = f2;
            x2 = a + gr * (b - a); f2 = f(x2);
        } else {
            b = x2;
            x2 = x1; f2 = f1;
            x1 = b - gr * (b - a); f1 = f(x1);
        }
    }
    ScalarMax best{lo, f(lo)};
    for (double cand : {0.5 * (a + b), hi}) {
        double fc = f(cand);
        if (fc > best.value) best = {cand, fc};
    }
    return best;
}

/// Maximum of f over unit vectors with nonnegative entries.
double positive_sphere_max(int dim, const std::function<double(std::span<const double>)>& f) {
    if (dim == 1) {
        double u[1] = {1.0};
        return f(std::span<const double>(u, 1));
    }
    if (dim == 2) {
        auto eval = [&](double theta) {
            double u[2] = {std::cos(theta), std::sin(theta)};
            return f(std::span<const double>(u, 2));
        };
        const int m = 4096;
        const double half_pi = std::numbers::pi / 2.0;
        double best_theta = 0.0, best = eval(0.0);
        for (int k = 1; k <= m; ++k) {
            double theta = half_pi * k / m;
            double v = eval(theta);
            if (v > best) { best = v; best_theta = theta; }
        }
        double lo = std::max(0.0, best_theta - half_pi / m);
        double hi = std::min(half_pi, best_theta + half_pi / m);
        return std::max(best, golden_max(eval, lo, hi).value);
    }
    if (dim == 3) {
        auto eval = [&](double theta, double phi) {
            double u[3] = {std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta),
                           std::cos(phi)};
            return f(std::span<const double>(u, 3));
        };
        const int m = 192;
        const double half_pi = std::numbers::pi / 2.0;
        double bt = 0.0, bp = 0.0, best = eval(0.0, 0.0);
        for (int i = 0; i <= m; ++i) {
            for (int j = 0; j <= m; ++j) {
                double v = eval(half_pi * i / m, half_pi * j / m);
                if (v > best) { best = v; bt = half_pi * i / m; bp = half_pi * j / m; }
            }
        }
        for (int round = 0; round < 4; ++round) {
            auto ft = [&](double t) { return eval(t, bp); };
            bt = golden_max(ft, std::max(0.0, bt - half_pi / m), std::min(half_pi, bt + half_pi / m)).arg;
            auto fp = [&](double p) { return eval(bt, p); };
            bp = golden_max(fp, std::max(0.0, bp - half_pi / m), std::min(half_pi, bp + half_pi / m)).arg;
        }
        return std::max(best, eval(bt, bp));
    }
    // High dimensions: axes, diagonal and random directions.
    std::vector<double> u(dim, 0.0);
    double best = -1e300;
    for (int a = 0; a < dim; ++a) {
        std::fill(u.begin(), u.end(), 0.0);
        u[a] = 1.0;
        best = std::max(best, f(u));
    }
    std::fill(u.begin(), u.end(), 1.0 / std::sqrt(static_cast<double>(dim)));
    best = std::max(best, f(u));
    std::uint64_t s = 0x5eedULL;
    for (int trial = 0; trial < 4096; ++trial) {
        double norm = 0.0;
        for (int a = 0; a < dim; ++a) {
            u[a] = (splitmix64(s) >> 11) * 0x1.0p-53;
            norm += u[a] * u[a];
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        for (double& c : u) c /= norm;
        best = std::max(best, f(u));
    }
    return best;
}

/// Every point of a res^d sampling grid passed to fn.
void for_each_grid_point(int dim, int res, const std::function<void(const TorusPoint&)>& fn) {
    std::vector<int> idx(dim, 0);
    std::vector<double> coords(dim, 0.0);
    while (true) {
        for (int a = 0; a < dim; ++a) coords[a] = static_cast<double>(idx[a]) / res;
        fn(TorusPoint(coords));
        int a = dim - 1;
        while (a >= 0 && ++idx[a] == res) idx[a--] = 0;
        if (a < 0) break;
    }
}

} // namespace

Potential Potential::zero(int dim) {
    Potential p;
    p.kind_ = Kind::trig_polynomial;
    p.dim_ = dim;
    return p;
}

Potential Potential::trig(int dim, std::vector<TrigTerm> terms) {
    for (const auto& t : terms) {
        if (static_cast<int>(t.wave.size()) != dim)
            throw std::invalid_argument("Potential::trig: wave multi-index arity mismatch");
    }
    Potential p;
    p.kind_ = Kind::trig_polynomial;
    p.dim_ = dim;
    p.terms_ = std::move(terms);
    return p;
}

Potential Potential::tabulated(int dim, int table_resolution, std::vector<double> values) {
    std::size_t expect = 1;
    for (int a = 0; a < dim; ++a) expect *= static_cast<std::size_t>(table_resolution);
    if (table_resolution < 2 || values.size() != expect)
        throw std::invalid_argument("Potential::tabulated: need resolution^dim values");
    Potential p;
    p.kind_ = Kind::tabulated;
    p.dim_ = dim;
    p.table_resolution_ = table_resolution;
    p.table_ = std::move(values);
    return p;
}

double Potential::table_value(std::span<const double> coords) const {
    const int m = table_resolution_;
    const int d = dim_;
    std::vector<int> base(d);
    std::vector<double> frac(d);
    for (int a = 0; a < d; ++a) {
        double s = coords[a] - std::floor(coords[a]);
        double scaled = s * m;
        int b = static_cast<int>(std::floor(scaled));
        if (b >= m) b = m - 1;
        base[a] = b;
        frac[a] = scaled - b;
    }
    double acc = 0.0;
    for (unsigned corner = 0; corner < (1u << d); ++corner) {
        double w = 1.0;
        std::size_t flat = 0;
        for (int a = 0; a < d; ++a) {
            std::size_t stride = 1;
            for (int b = a + 1; b < d; ++b) stride *= static_cast<std::size_t>(m);
            int k = base[a];
            if (corner & (1u << a)) {
                k = (k + 1) % m;
                w *= frac[a];
            } else {
                w *= 1.0 - frac[a];
            }
            flat += stride * static_cast<std::size_t>(k);
        }
        acc += w * table_[flat];
    }
    return acc;
}

double Potential::value(const TorusPoint& x) const {
    if (x.dim() != dim_) throw std::invalid_argument("Potential::value: dimension mismatch");
    if (kind_ == Kind::tabulated) return table_value(x.coords);
    double acc = 0.0;
    for (const auto& t : terms_) {
        double phase = 0.0;
        for (int a = 0; a < dim_; ++a) phase += t.wave[a] * x.coords[a];
        phase *= two_pi;
        acc += t.cos_coeff * std::cos(phase) + t.sin_coeff * std::sin(phase);
    }
    return acc;
}

std::vector<double> Potential::gradient(const TorusPoint& x) const {
    if (x.dim() != dim_) throw std::invalid_argument("Potential::gradient: dimension mismatch");
    std::vector<double> grad(dim_, 0.0);
    if (kind_ == Kind::tabulated) {
        double step = 1.0 / table_resolution_;
        std::vector<double> shifted = x.coords;
        for (int a = 0; a < dim_; ++a) {
            shifted[a] = x.coords[a] + step;
            double up = table_value(shifted);
            shifted[a] = x.coords[a] - step;
            double down = table_value(shifted);
            shifted[a] = x.coords[a];
            grad[a] = (up - down) / (2.0 * step);
        }
        return grad;
    }
    for (const auto& t : terms_) {
        double phase = 0.0;
        for (int a = 0; a < dim_; ++a) phase += t.wave[a] * x.coords[a];
        phase *= two_pi;
        double s = std::sin(phase), c = std::cos(phase);
        for (int a = 0; a < dim_; ++a) {
            grad[a] += two_pi * t.wave[a] * (-t.cos_coeff * s + t.sin_coeff * c);
        }
    }
    return grad;
}

LagrangianSpec quadratic_lagrangian(int dim, Potential potential) {
    LagrangianSpec spec;
    spec.kinetic.assign(dim, KineticAxis{2.0, 1.0});
    spec.potential = std::move(potential);
    return spec;
}

LagrangianSpec power_lagrangian(std::vector<KineticAxis> kinetic, Potential potential) {
    LagrangianSpec spec;
    spec.kinetic = std::move(kinetic);
    spec.potential = std::move(potential);
    return spec;
}

double eval_L(const LagrangianSpec& spec, const TorusPoint& x, std::span<const double> v) {
    if (static_cast<int>(v.size()) != spec.dim())
        throw std::invalid_argument("eval_L: velocity arity mismatch");
    if (spec.generic_hook) return spec.generic_hook(x, v);
    double acc = spec.potential.value(x);
    for (int a = 0; a < spec.dim(); ++a) {
        const auto& ax = spec.kinetic[a];
        acc += ax.weight * std::pow(std::abs(v[a]), ax.exponent) / ax.exponent;
    }
    return acc;
}

AxisConjugate axis_conjugate(double slope, const KineticAxis& axis) {
    if (slope <= 0.0) return {0.0, 0.0};
    double w = std::pow(slope / axis.weight, 1.0 / (axis.exponent - 1.0));
    double value = slope * w - axis.weight * std::pow(w, axis.exponent) / axis.exponent;
    return {value, w};
}

AxisConjugate axis_conjugate_capped(double slope, const KineticAxis& axis, double cap) {
    if (slope <= 0.0 || cap <= 0.0) return {0.0, 0.0};
    double w = std::pow(slope / axis.weight, 1.0 / (axis.exponent - 1.0));
    if (w > cap) w = cap;
    double value = slope * w - axis.weight * std::pow(w, axis.exponent) / axis.exponent;
    if (value < 0.0) return {0.0, 0.0};
    return {value, w};
}

namespace {

/// Coordinate-ascent maximization of v -> xi.v - L(x,v) for black-box
/// Lagrangians; each one-sided axis slice is concave, so golden section
/// applies per side.
LatticeHamiltonianResult hook_hamiltonian(const LagrangianSpec& spec, const TorusPoint& x,
                                          const DiscreteGradient& xi) {
    if (!spec.hook_box)
        throw ConfigError("lattice_hamiltonian: generic Lagrangian requires a velocity box");
    const int d = spec.dim();
    Velocity v(d, 0.0);
    auto objective = [&](const Velocity& w) {
        double dot = 0.0;
        for (int a = 0; a < d; ++a) {
            dot += xi.pairs[a].first * std::max(w[a], 0.0) +
                   xi.pairs[a].second * std::max(-w[a], 0.0);
        }
        return dot - spec.generic_hook(x, w);
    };
    double current = objective(v);
    for (int sweep = 0; sweep < 200; ++sweep) {
        double before = current;
        for (int a = 0; a < d; ++a) {
            double cap = spec.hook_box->half_width[a];
            auto slice = [&](double w) {
                Velocity trial = v;
                trial[a] = w;
                return objective(trial);
            };
            ScalarMax pos = golden_max(slice, 0.0, cap);
            ScalarMax neg = golden_max(slice, -cap, 0.0);
            ScalarMax pick = pos.value >= neg.value ? pos : neg;
            if (pick.value > current) {
                v[a] = pick.arg;
                current = pick.value;
            }
        }
        if (current - before <= 1e-13 * (1.0 + std::abs(current))) break;
    }
    return {current, v};
}

} // namespace

LatticeHamiltonianResult lattice_hamiltonian(const LagrangianSpec& spec, const TorusPoint& x,
                                             const DiscreteGradient& xi) {
    if (xi.dim() != spec.dim())
        throw std::invalid_argument("lattice_hamiltonian: gradient arity mismatch");
    if (spec.generic_hook) return hook_hamiltonian(spec, x, xi);

    LatticeHamiltonianResult out;
    out.argmax.assign(spec.dim(), 0.0);
    out.value = -spec.potential.value(x);
    for (int a = 0; a < spec.dim(); ++a) {
        AxisConjugate pos = axis_conjugate(xi.pairs[a].first, spec.kinetic[a]);
        AxisConjugate neg = axis_conjugate(xi.pairs[a].second, spec.kinetic[a]);
        if (pos.value > neg.value) {
            out.value += pos.value;
            out.argmax[a] = pos.speed;
        } else if (neg.value > pos.value) {
            out.value += neg.value;
            out.argmax[a] = -neg.speed;
        } else {
            // Equal value: smaller speed wins, positive direction on a full tie.
            out.value += pos.value;
            out.argmax[a] = pos.speed <= neg.speed ? pos.speed : -neg.speed;
        }
    }
    return out;
}

double eval_H_continuous(const LagrangianSpec& spec, const TorusPoint& x,
                         std::span<const double> p) {
    if (static_cast<int>(p.size()) != spec.dim())
        throw std::invalid_argument("eval_H_continuous: covector arity mismatch");
    if (spec.generic_hook) {
        DiscreteGradient xi;
        xi.pairs.resize(spec.dim());
        for (int a = 0; a < spec.dim(); ++a) xi.pairs[a] = {p[a], -p[a]};
        return hook_hamiltonian(spec, x, xi).value;
    }
    double acc = -spec.potential.value(x);
    for (int a = 0; a < spec.dim(); ++a) {
        acc += axis_conjugate(std::abs(p[a]), spec.kinetic[a]).value;
    }
    return acc;
}

double DiagnosticConstants::g(double a) const {
    auto conj_sum = [&](std::span<const double> u) {
        double acc = 0.0;
        for (int i = 0; i < dim; ++i) acc += axis_conjugate(a * u[i], kinetic[i]).value;
        return acc;
    };
    double gmax = positive_sphere_max(dim, conj_sum);
    // Slight inflation keeps L >= a|v| + g(a) safe against sampling error.
    gmax = gmax * (1.0 + 1e-9) + 1e-12;
    return min_potential - gmax;
}

double DiagnosticConstants::K(double) const { return sup_grad_potential; }

DiagnosticConstants diagnostic_constants(const LagrangianSpec& spec, int sampling_resolution) {
    const int d = spec.dim();
    int res = sampling_resolution;
    if (res == 0) res = d == 1 ? 1024 : (d == 2 ? 256 : 64);
    if (res < 64) throw std::invalid_argument("diagnostic_constants: resolution must be >= 64");

    DiagnosticConstants c;
    c.dim = d;
    c.kinetic = spec.kinetic;

    double min_p = 1e300, max_p = -1e300, max_grad = 0.0;
    if (spec.generic_hook) {
        // Black-box family: probe L(x,0) for the potential-like variation and
        // finite differences for the x-sensitivity.
        Velocity zero(d, 0.0);
        const double step = 1e-5;
        for_each_grid_point(d, res, [&](const TorusPoint& x) {
            double v0 = spec.generic_hook(x, zero);
            min_p = std::min(min_p, v0);
            max_p = std::max(max_p, v0);
            double grad_sq = 0.0;
            for (int a = 0; a < d; ++a) {
                std::vector<double> up = x.coords, down = x.coords;
                up[a] += step;
                down[a] -= step;
                double df = (spec.generic_hook(canonical(up), zero) -
                             spec.generic_hook(canonical(down), zero)) /
                            (2.0 * step);
                grad_sq += df * df;
            }
            max_grad = std::max(max_grad, std::sqrt(grad_sq));
        });
    } else {
        for_each_grid_point(d, res, [&](const TorusPoint& x) {
            double p = spec.potential.value(x);
            min_p = std::min(min_p, p);
            max_p = std::max(max_p, p);
            auto grad = spec.potential.gradient(x);
            double norm_sq = 0.0;
            for (double gcomp : grad) norm_sq += gcomp * gcomp;
            max_grad = std::max(max_grad, std::sqrt(norm_sq));
        });
    }
    c.min_potential = min_p;
    c.max_potential = max_p;
    c.sup_grad_potential = max_grad;

    auto kinetic_sum = [&](std::span<const double> u) {
        double acc = 0.0;
        for (int a = 0; a < d; ++a) {
            const auto& ax = spec.kinetic[a];
            acc += ax.weight * std::pow(std::abs(u[a]), ax.exponent) / ax.exponent;
        }
        return acc;
    };
    c.unit_sphere_kinetic = positive_sphere_max(d, kinetic_sum) * (1.0 + 1e-9);

    double sup_L_zero = max_p;
    double sup_L_unit = c.unit_sphere_kinetic + max_p; // kinetic max sits on the sphere
    c.c0 = std::max(std::abs(c.g(0.0)), sup_L_zero);
    c.c1 = c.c0 + sup_L_unit + 1.0;
    c.c2 = c.c0 - c.g(2.0 * c.c1 + 2.0) / 2.0;
    c.c3 = c.c0 + sup_L_unit;
    c.c4 = std::sqrt(static_cast<double>(d)) * c.c3;
    c.c5 = c.c0 - c.g(std::sqrt(static_cast<double>(d)) * c.c3 + 1.0);
    c.c6 = c.c0 - c.g(c.c1 + 1.0);
    return c;
}

} // namespace kamgrid
