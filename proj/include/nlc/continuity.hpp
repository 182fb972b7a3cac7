#ifndef NLC_CONTINUITY_HPP
#define NLC_CONTINUITY_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nlc/grid.hpp"
#include "nlc/linear_solvers.hpp"
#include "nlc/operators.hpp"

namespace nlc {

/// Artificial viscosity eps, artificial pressure delta * rho^beta.
struct RegularizationParams {
    double eps = 0.0;
    double delta = 0.0;
    double beta = 13.0;

    /// Threshold on beta above which the vanishing-viscosity estimates hold.
    static double strong_beta_threshold(double gamma) { return 6.0 * gamma / (2.0 * gamma - 3.0); }

    /// Throws invalid_input on hard violations, returns warnings otherwise.
    std::vector<std::string> validate(double gamma) const {
        std::vector<std::string> warnings;
        if (!(eps >= 0.0)) throw invalid_input("reg.eps must be >= 0");
        if (!(delta >= 0.0)) throw invalid_input("reg.delta must be >= 0");
        if (delta > 0.0) {
            if (!(beta > std::max(4.0, gamma)))
                throw invalid_input("reg.beta must exceed max{4, gamma} when reg.delta > 0");
            if (gamma > 1.5 && beta <= strong_beta_threshold(gamma))
                warnings.push_back("reg.beta = " + std::to_string(beta) + " does not exceed 6*gamma/(2*gamma-3) = " +
                                   std::to_string(strong_beta_threshold(gamma)) +
                                   "; the vanishing-viscosity limit assumes it does");
        }
        return warnings;
    }
};

struct LinearSolveOptions {
    double tol = 1e-10;
    int max_iter = 5000;
};

inline double max_speed(const VectorField& u) {
    double m = 0.0;
    for (std::size_t i = 0; i < u.cells(); ++i) {
        double s = 0.0;
        for (int c = 0; c < u.components(); ++c) s += u(c, i) * u(c, i);
        m = std::max(m, std::sqrt(s));
    }
    return m;
}

/// safety * h_min / (max|u| + tiny). The caller caps the result by dt_max.
inline double cfl_dt(const VectorField& u, const Grid& g, double safety) {
    if (!(safety > 0.0 && safety <= 1.0)) throw invalid_input("time.safety must lie in (0, 1]");
    constexpr double tiny = 1e-30;
    return safety * g.min_spacing() / (max_speed(u) + tiny);
}

/// Normal velocity on the interior face between `idx` and `idx + stride(a)`:
/// the mean of the adjacent cell values. Wall faces carry zero velocity.
inline double face_velocity(const VectorField& u, int axis, std::size_t idx) {
    return 0.5 * (u(axis, idx) + u(axis, idx + u.grid().stride(axis)));
}

/// Cellwise divergence of the upwind flux q_upwind * u_face.
inline std::vector<double> upwind_flux_divergence(std::span<const double> q, const VectorField& u) {
    const Grid& g = u.grid();
    std::vector<double> div(g.cells(), 0.0);
    for (int a = 0; a < g.dim; ++a) {
        const std::size_t s = g.stride(a);
        const int n = g.count[a];
        const double h = g.spacing[a];
        for (std::size_t idx = 0; idx < g.cells(); ++idx) {
            if (detail::axis_index(g, idx, a) == n - 1) continue;
            const double w = face_velocity(u, a, idx);
            const double F = w * (w > 0.0 ? q[idx] : q[idx + s]);
            div[idx] += F / h;
            div[idx + s] -= F / h;
        }
    }
    return div;
}

/// Divergence of the face velocities (the discrete div u seen by the
/// continuity flux).
inline std::vector<double> face_divergence(const VectorField& u) {
    const Grid& g = u.grid();
    std::vector<double> div(g.cells(), 0.0);
    for (int a = 0; a < g.dim; ++a) {
        const std::size_t s = g.stride(a);
        const int n = g.count[a];
        const double h = g.spacing[a];
        for (std::size_t idx = 0; idx < g.cells(); ++idx) {
            if (detail::axis_index(g, idx, a) == n - 1) continue;
            const double w = face_velocity(u, a, idx);
            div[idx] += w / h;
            div[idx + s] -= w / h;
        }
    }
    return div;
}

/// One step of rho_t + div(rho u) = eps Lap(rho), homogeneous Neumann.
///
/// Explicit conservative upwind transport followed by a backward-Euler
/// diffusion solve. Rejects dt above the CFL bound h_min / max|u|.
inline ScalarField continuity_step(const ScalarField& rho, const VectorField& u, double eps, double dt,
                                   const LinearSolveOptions& opts = {}) {
    const Grid& g = rho.grid();
    if (!(dt > 0.0)) throw invalid_input("continuity_step requires dt > 0");
    if (!(eps >= 0.0)) throw invalid_input("continuity_step requires eps >= 0");
    const double umax = max_speed(u);
    if (dt * umax > g.min_spacing())
        throw solver_error("CFL violated in continuity step: dt = " + std::to_string(dt) +
                           " exceeds h/max|u| = " + std::to_string(g.min_spacing() / umax));

    ScalarField out = rho;
    auto div = upwind_flux_divergence(rho.component(0), u);
    auto r = out.component(0);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= dt * div[i];

    if (eps > 0.0) {
        // increment form: (I - k Lap) z = k Lap(rhs), rho_new = rhs + z; z sums to zero
        const double kappa = dt * eps;
        auto apply = [&](std::span<const double> x, std::span<double> y) {
            apply_shifted_laplacian(x, y, g, kappa, BoundaryKind::neumann);
        };
        std::vector<double> res(r.size()), z(r.size(), 0.0);
        apply(r, res);
        for (std::size_t i = 0; i < res.size(); ++i) res[i] = r[i] - res[i];
        conjugate_gradient(apply, res, z, opts.tol, opts.max_iter);
        for (std::size_t i = 0; i < z.size(); ++i) r[i] += z[i];
    }
    if (!out.all_finite()) throw solver_error("non-finite density after continuity step");
    return out;
}

}  // namespace nlc

#endif  // NLC_CONTINUITY_HPP
