#ifndef NLC_OPERATORS_HPP
#define NLC_OPERATORS_HPP

#include <cmath>
#include <span>
#include <vector>

#include "nlc/grid.hpp"

namespace nlc {

namespace detail {

inline int axis_index(const Grid& g, std::size_t idx, int axis) {
    return static_cast<int>((idx / g.stride(axis)) % static_cast<std::size_t>(g.count[axis]));
}

}  // namespace detail

/// First derivative of one component along `axis`.
///
/// Interior cells use second-order central differences. At boundary cells:
/// Neumann mirrors the ghost (central difference), Dirichlet fits a quadratic
/// through the wall trace and the two nearest cells, extrapolate uses the
/// one-sided three-point formula. All three are exact on quadratics that
/// respect the boundary condition.
inline std::vector<double> partial(std::span<const double> f, const Grid& g, int axis, const BoundarySpec& bc,
                                   int comp = 0) {
    const std::size_t s = g.stride(axis);
    const int n = g.count[axis];
    const double h = g.spacing[axis];
    std::vector<double> out(f.size());
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
        const int i = detail::axis_index(g, idx, axis);
        if (i > 0 && i < n - 1) {
            out[idx] = (f[idx + s] - f[idx - s]) / (2.0 * h);
            continue;
        }
        const bool left = (i == 0);
        switch (bc.kind) {
        case BoundaryKind::neumann:
            out[idx] = left ? (f[idx + s] - f[idx]) / (2.0 * h) : (f[idx] - f[idx - s]) / (2.0 * h);
            break;
        case BoundaryKind::dirichlet: {
            const double t = bc.trace_value(axis, left ? 0 : 1, idx, comp);
            out[idx] = left ? (f[idx + s] + 3.0 * f[idx] - 4.0 * t) / (3.0 * h)
                            : (4.0 * t - 3.0 * f[idx] - f[idx - s]) / (3.0 * h);
            break;
        }
        case BoundaryKind::extrapolate:
            out[idx] = left ? (-3.0 * f[idx] + 4.0 * f[idx + s] - f[idx + 2 * s]) / (2.0 * h)
                            : (3.0 * f[idx] - 4.0 * f[idx - s] + f[idx - 2 * s]) / (2.0 * h);
            break;
        }
    }
    return out;
}

/// Second derivative of one component along `axis` (3-point stencil with
/// ghost values from the boundary condition).
inline std::vector<double> second_partial(std::span<const double> f, const Grid& g, int axis, const BoundarySpec& bc,
                                          int comp = 0) {
    const std::size_t s = g.stride(axis);
    const int n = g.count[axis];
    const double h2 = g.spacing[axis] * g.spacing[axis];
    std::vector<double> out(f.size());
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
        const int i = detail::axis_index(g, idx, axis);
        if (i > 0 && i < n - 1) {
            out[idx] = (f[idx + s] - 2.0 * f[idx] + f[idx - s]) / h2;
            continue;
        }
        const bool left = (i == 0);
        const double inner = left ? f[idx + s] : f[idx - s];
        switch (bc.kind) {
        case BoundaryKind::neumann: out[idx] = (inner - f[idx]) / h2; break;
        case BoundaryKind::dirichlet: {
            const double t = bc.trace_value(axis, left ? 0 : 1, idx, comp);
            out[idx] = (inner - 3.0 * f[idx] + 2.0 * t) / h2;
            break;
        }
        case BoundaryKind::extrapolate: {
            const std::ptrdiff_t d = left ? static_cast<std::ptrdiff_t>(s) : -static_cast<std::ptrdiff_t>(s);
            const double f1 = f[idx + d], f2 = f[idx + 2 * d], f3 = f[idx + 3 * d];
            out[idx] = (2.0 * f[idx] - 5.0 * f1 + 4.0 * f2 - f3) / h2;
            break;
        }
        }
    }
    return out;
}

/// Laplacian of a single component.
inline std::vector<double> laplacian(std::span<const double> f, const Grid& g, const BoundarySpec& bc, int comp = 0) {
    std::vector<double> out(f.size(), 0.0);
    for (int a = 0; a < g.dim; ++a) {
        auto d2 = second_partial(f, g, a, bc, comp);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += d2[i];
    }
    return out;
}

template <FieldKind Kind>
Field<Kind> laplacian(const Field<Kind>& f, const BoundarySpec& bc) {
    Field<Kind> out(f.grid());
    for (int c = 0; c < f.components(); ++c) {
        auto l = laplacian(f.component(c), f.grid(), bc, c);
        std::copy(l.begin(), l.end(), out.component(c).begin());
    }
    return out;
}

inline VectorField gradient(const ScalarField& s, const BoundarySpec& bc) {
    VectorField out(s.grid());
    for (int a = 0; a < s.grid().dim; ++a) {
        auto d = partial(s.component(0), s.grid(), a, bc);
        std::copy(d.begin(), d.end(), out.component(a).begin());
    }
    return out;
}

/// `partials[m][a]` = d(component m)/dx_a.
template <FieldKind Kind>
std::vector<std::vector<std::vector<double>>> jacobian(const Field<Kind>& f, const BoundarySpec& bc) {
    const Grid& g = f.grid();
    std::vector<std::vector<std::vector<double>>> J(f.components());
    for (int m = 0; m < f.components(); ++m)
        for (int a = 0; a < g.dim; ++a) J[m].push_back(partial(f.component(m), g, a, bc, m));
    return J;
}

inline ScalarField divergence(const VectorField& v, const BoundarySpec& bc = BoundarySpec::extrapolate()) {
    const Grid& g = v.grid();
    ScalarField out(g);
    for (int a = 0; a < g.dim; ++a) {
        auto d = partial(v.component(a), g, a, bc, a);
        for (std::size_t i = 0; i < d.size(); ++i) out(0, i) += d[i];
    }
    return out;
}

/// First-order upwind `u . grad f`, componentwise.
///
/// At a boundary cell with inflow through the wall, the Dirichlet trace sits
/// half a cell away; Neumann contributes nothing; extrapolate falls back to
/// the inner one-sided difference.
template <FieldKind Kind>
Field<Kind> advect(const Field<Kind>& f, const VectorField& u, const BoundarySpec& bc) {
    const Grid& g = f.grid();
    Field<Kind> out(g);
    for (int c = 0; c < f.components(); ++c) {
        auto fc = f.component(c);
        for (int a = 0; a < g.dim; ++a) {
            const std::size_t s = g.stride(a);
            const int n = g.count[a];
            const double h = g.spacing[a];
            auto ua = u.component(a);
            for (std::size_t idx = 0; idx < g.cells(); ++idx) {
                const double w = ua[idx];
                if (w == 0.0) continue;
                const int i = detail::axis_index(g, idx, a);
                double deriv = 0.0;
                if (w > 0.0) {
                    if (i > 0) {
                        deriv = (fc[idx] - fc[idx - s]) / h;
                    } else if (bc.kind == BoundaryKind::dirichlet) {
                        deriv = (fc[idx] - bc.trace_value(a, 0, idx, c)) / (0.5 * h);
                    } else if (bc.kind == BoundaryKind::extrapolate) {
                        deriv = (fc[idx + s] - fc[idx]) / h;
                    }
                } else {
                    if (i < n - 1) {
                        deriv = (fc[idx + s] - fc[idx]) / h;
                    } else if (bc.kind == BoundaryKind::dirichlet) {
                        deriv = (bc.trace_value(a, 1, idx, c) - fc[idx]) / (0.5 * h);
                    } else if (bc.kind == BoundaryKind::extrapolate) {
                        deriv = (fc[idx] - fc[idx - s]) / h;
                    }
                }
                out(c, idx) += w * deriv;
            }
        }
    }
    return out;
}

/// Ericksen stress grad d (.) grad d - (|grad d|^2 / 2 + F(d)) I restricted
/// to the spatial rows/columns; T[a][b] holds cell values (symmetric, both
/// triangles filled).
template <class Penalty>
std::vector<std::vector<std::vector<double>>> ericksen_stress(const DirectorField& d, const BoundarySpec& bc,
                                                              const Penalty& penalty) {
    const Grid& g = d.grid();
    const int dim = g.dim;
    const std::size_t N = g.cells();
    auto J = jacobian(d, bc);
    std::vector<std::vector<std::vector<double>>> T(dim, std::vector<std::vector<double>>(dim));
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) T[a][b].assign(N, 0.0);

    for (std::size_t i = 0; i < N; ++i) {
        double grad2 = 0.0;
        for (int m = 0; m < 3; ++m)
            for (int a = 0; a < dim; ++a) grad2 += J[m][a][i] * J[m][a][i];
        const double iso = 0.5 * grad2 + penalty.value(director_at(d, i));
        for (int a = 0; a < dim; ++a) {
            for (int b = a; b < dim; ++b) {
                double t = 0.0;
                for (int m = 0; m < 3; ++m) t += J[m][a][i] * J[m][b][i];
                if (a == b) t -= iso;
                T[a][b][i] = t;
                T[b][a][i] = t;
            }
        }
    }
    return T;
}

/// Divergence of the Ericksen stress, (div T)_b = sum_a d_a T_ab. The tensor
/// is assembled cellwise and then differentiated (one-sided at the walls).
template <class Penalty>
VectorField ericksen_stress_divergence(const DirectorField& d, const BoundarySpec& bc, const Penalty& penalty) {
    const Grid& g = d.grid();
    const auto T = ericksen_stress(d, bc, penalty);
    VectorField out(g);
    const auto ext = BoundarySpec::extrapolate();
    for (int a = 0; a < g.dim; ++a) {
        for (int b = 0; b < g.dim; ++b) {
            auto dTab = partial(T[a][b], g, a, ext);
            for (std::size_t i = 0; i < g.cells(); ++i) out(b, i) += dTab[i];
        }
    }
    return out;
}

/// (sum |s|^p dV)^(1/p) by midpoint quadrature.
inline double lp_norm(std::span<const double> s, const Grid& g, double p) {
    if (!(p >= 1.0)) throw invalid_input("lp_norm requires p >= 1");
    double acc = 0.0;
    if (p == 1.0) {
        for (double v : s) acc += std::abs(v);
        return acc * g.cell_volume();
    }
    if (p == 2.0) {
        for (double v : s) acc += v * v;
        return std::sqrt(acc * g.cell_volume());
    }
    for (double v : s) acc += std::pow(std::abs(v), p);
    return std::pow(acc * g.cell_volume(), 1.0 / p);
}

template <FieldKind Kind>
double lp_norm(const Field<Kind>& f, double p) {
    if constexpr (Kind == FieldKind::scalar) {
        return lp_norm(f.component(0), f.grid(), p);
    } else {
        // norm of the pointwise Euclidean magnitude
        std::vector<double> mag(f.cells(), 0.0);
        for (int c = 0; c < f.components(); ++c)
            for (std::size_t i = 0; i < f.cells(); ++i) mag[i] += f(c, i) * f(c, i);
        for (double& m : mag) m = std::sqrt(m);
        return lp_norm(mag, f.grid(), p);
    }
}

/// Squared discrete Dirichlet integral of one component, face based:
/// interior faces contribute ((f_R - f_L) / h)^2 dV, wall faces contribute
/// half of ((f_b - t) / (h/2))^2 dV (Dirichlet) or nothing otherwise. This is
/// the quadratic form whose gradient is minus the ghost-cell Laplacian.
inline double dirichlet_integral(std::span<const double> f, const Grid& g, const BoundarySpec& bc, int comp = 0) {
    double acc = 0.0;
    for (int a = 0; a < g.dim; ++a) {
        const std::size_t s = g.stride(a);
        const int n = g.count[a];
        const double h = g.spacing[a];
        for (std::size_t idx = 0; idx < f.size(); ++idx) {
            const int i = detail::axis_index(g, idx, a);
            if (i < n - 1) {
                const double df = (f[idx + s] - f[idx]) / h;
                acc += df * df;
            }
            if (bc.kind == BoundaryKind::dirichlet) {
                if (i == 0) {
                    const double df = (f[idx] - bc.trace_value(a, 0, idx, comp)) / (0.5 * h);
                    acc += 0.5 * df * df;
                }
                if (i == n - 1) {
                    const double df = (bc.trace_value(a, 1, idx, comp) - f[idx]) / (0.5 * h);
                    acc += 0.5 * df * df;
                }
            }
        }
    }
    return acc * g.cell_volume();
}

/// L2 norm of the gradient, using the face-based Dirichlet integral.
template <FieldKind Kind>
double h1_seminorm(const Field<Kind>& f, const BoundarySpec& bc) {
    double acc = 0.0;
    for (int c = 0; c < f.components(); ++c) acc += dirichlet_integral(f.component(c), f.grid(), bc, c);
    return std::sqrt(acc);
}

template <FieldKind Kind>
Field<Kind> operator-(const Field<Kind>& a, const Field<Kind>& b) {
    Field<Kind> out(a.grid());
    for (std::size_t i = 0; i < a.data().size(); ++i) out.data()[i] = a.data()[i] - b.data()[i];
    return out;
}

template <FieldKind Kind>
Field<Kind> operator*(double s, const Field<Kind>& a) {
    Field<Kind> out(a.grid());
    for (std::size_t i = 0; i < a.data().size(); ++i) out.data()[i] = s * a.data()[i];
    return out;
}

template <FieldKind Kind>
double max_abs(const Field<Kind>& f) {
    double m = 0.0;
    for (double v : f.data()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace nlc

#endif  // NLC_OPERATORS_HPP
