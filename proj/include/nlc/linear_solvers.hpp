#ifndef NLC_LINEAR_SOLVERS_HPP
#define NLC_LINEAR_SOLVERS_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "nlc/grid.hpp"

namespace nlc {

struct CgResult {
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Unpreconditioned conjugate gradients for a symmetric positive definite
/// operator given as `apply(x, y)` computing y = A x. `x` holds the initial
/// guess on entry. Throws solver_error if the relative residual does not
/// reach `tol` within `max_iter` iterations.
///
/// When A^T 1 = 1 and the initial residual sums to zero, every search
/// direction sums to zero too, so sum(x) is preserved up to rounding. The
/// continuity solver relies on this for mass conservation.
template <class Apply>
CgResult conjugate_gradient(Apply&& apply, std::span<const double> b_in, std::span<double> x, double tol,
                            int max_iter) {
    const std::size_t n = b_in.size();
    double bmax = 0.0;
    for (double v : b_in) bmax = std::max(bmax, std::abs(v));
    if (bmax == 0.0) {
        // A is SPD, so the solution is zero
        for (double& v : x) v = 0.0;
        return {0, 0.0};
    }
    // power-of-two rescaling keeps squared norms clear of under/overflow
    const int shift = -std::ilogb(bmax);
    std::vector<double> b(n), r(n), p(n), Ap(n);
    for (std::size_t i = 0; i < n; ++i) {
        b[i] = std::ldexp(b_in[i], shift);
        x[i] = std::ldexp(x[i], shift);
    }
    apply(std::span<const double>(x.data(), n), std::span<double>(Ap));
    double bnorm2 = 0.0, rr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = b[i] - Ap[i];
        p[i] = r[i];
        bnorm2 += b[i] * b[i];
        rr += r[i] * r[i];
    }
    const double bnorm = std::sqrt(bnorm2);
    CgResult res;
    res.relative_residual = std::sqrt(rr) / bnorm;
    while (res.relative_residual > tol) {
        if (res.iterations >= max_iter)
            throw solver_error("conjugate gradient did not converge: relative residual " +
                               std::to_string(res.relative_residual) + " after " + std::to_string(max_iter) +
                               " iterations");
        apply(std::span<const double>(p), std::span<double>(Ap));
        double pAp = 0.0;
        for (std::size_t i = 0; i < n; ++i) pAp += p[i] * Ap[i];
        if (!(pAp > 0.0)) throw solver_error("conjugate gradient breakdown (operator not positive definite)");
        const double alpha = rr / pAp;
        double rr_new = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
            rr_new += r[i] * r[i];
        }
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        ++res.iterations;
        res.relative_residual = std::sqrt(rr) / bnorm;
    }
    for (double& v : x) v = std::ldexp(v, -shift);
    return res;
}

/// y = x - kappa * Lap(x) for one component, with homogeneous ghost data
/// (mirror for Neumann, antisymmetric for Dirichlet). Both are symmetric.
inline void apply_shifted_laplacian(std::span<const double> x, std::span<double> y, const Grid& g, double kappa,
                                    BoundaryKind kind) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i];
    for (int a = 0; a < g.dim; ++a) {
        const std::size_t s = g.stride(a);
        const int n = g.count[a];
        const double c = kappa / (g.spacing[a] * g.spacing[a]);
        for (std::size_t idx = 0; idx < x.size(); ++idx) {
            const int i = static_cast<int>((idx / s) % static_cast<std::size_t>(n));
            double lap = -2.0 * x[idx];
            lap += (i > 0) ? x[idx - s] : (kind == BoundaryKind::neumann ? x[idx] : -x[idx]);
            lap += (i < n - 1) ? x[idx + s] : (kind == BoundaryKind::neumann ? x[idx] : -x[idx]);
            y[idx] -= c * lap;
        }
    }
}

}  // namespace nlc

#endif  // NLC_LINEAR_SOLVERS_HPP
