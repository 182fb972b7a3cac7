#ifndef NLC_DIRECTOR_HPP
#define NLC_DIRECTOR_HPP

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>

#include "nlc/continuity.hpp"
#include "nlc/grid.hpp"
#include "nlc/linear_solvers.hpp"
#include "nlc/operators.hpp"
#include "nlc/penalty.hpp"

namespace nlc {

/// Director field together with its wall trace d0.
struct DirectorState {
    DirectorField d;
    std::shared_ptr<const BoundaryTrace> trace;

    BoundarySpec bc() const { return BoundarySpec::dirichlet(trace); }
};

inline DirectorState make_director_state(DirectorField d, BoundaryTrace trace) {
    return {std::move(d), std::make_shared<const BoundaryTrace>(std::move(trace))};
}

/// Upper bound on |d| implied by the structural condition: max(C0, max|d0|).
template <Penalty P>
double max_principle_bound(const P& penalty, const BoundaryTrace& trace) {
    return std::max(penalty.c0(), trace.max_norm());
}

/// Cellwise Lap(d) - f(d) with the Dirichlet trace as ghost data.
template <Penalty P>
DirectorField director_residual_field(const DirectorField& d, const BoundarySpec& bc, const P& penalty) {
    DirectorField r = laplacian(d, bc);
    for (std::size_t i = 0; i < d.cells(); ++i) {
        const Vec3 f = penalty.force(director_at(d, i));
        for (int c = 0; c < 3; ++c) r(c, i) -= f[c];
    }
    return r;
}

/// || Lap(d) - f(d) ||_{L2}
template <Penalty P>
double steady_residual(const DirectorField& d, const BoundarySpec& bc, const P& penalty) {
    return lp_norm(director_residual_field(d, bc, penalty), 2.0);
}

/// Semi-implicit step of d_t + u . grad d = Lap(d) - f(d):
///   (I - dt Lap) d_new = d - dt (u . grad d + f(d))
/// componentwise, with the wall trace entering through the ghost cells.
template <Penalty P>
DirectorState director_step(const DirectorState& state, const VectorField& u, const P& penalty, double dt,
                            const LinearSolveOptions& opts = {}) {
    const DirectorField& d = state.d;
    const Grid& g = d.grid();
    if (!(dt > 0.0)) throw invalid_input("director_step requires dt > 0");
    if (dt * max_speed(u) > g.min_spacing()) throw solver_error("CFL violated in director step");
    const BoundarySpec bc = state.bc();

    DirectorField rhs = d;
    const DirectorField adv = advect(d, u, bc);
    for (std::size_t i = 0; i < g.cells(); ++i) {
        const Vec3 f = penalty.force(director_at(d, i));
        for (int c = 0; c < 3; ++c) rhs(c, i) -= dt * (adv(c, i) + f[c]);
    }
    // inhomogeneous part of the ghost values: Lap picks up 2 t / h^2
    for (int a = 0; a < g.dim; ++a) {
        const double w = 2.0 * dt / (g.spacing[a] * g.spacing[a]);
        const int n = g.count[a];
        for (std::size_t idx = 0; idx < g.cells(); ++idx) {
            const int i = detail::axis_index(g, idx, a);
            for (int c = 0; c < 3; ++c) {
                if (i == 0) rhs(c, idx) += w * bc.trace_value(a, 0, idx, c);
                if (i == n - 1) rhs(c, idx) += w * bc.trace_value(a, 1, idx, c);
            }
        }
    }

    // solve for the increment so the tolerance is relative to the update
    DirectorState next{d, state.trace};
    std::vector<double> res(g.cells()), inc(g.cells());
    auto apply = [&](std::span<const double> x, std::span<double> y) {
        apply_shifted_laplacian(x, y, g, dt, BoundaryKind::dirichlet);
    };
    for (int c = 0; c < 3; ++c) {
        auto dc = next.d.component(c);
        apply(dc, res);
        const auto b = rhs.component(c);
        for (std::size_t i = 0; i < res.size(); ++i) res[i] = b[i] - res[i];
        std::fill(inc.begin(), inc.end(), 0.0);
        conjugate_gradient(apply, res, inc, opts.tol, opts.max_iter);
        for (std::size_t i = 0; i < inc.size(); ++i) dc[i] += inc[i];
    }
    if (!next.d.all_finite()) throw solver_error("non-finite director after director step");
    return next;
}

struct SteadyOptions {
    double tol = 1e-8;
    int max_iters = 5000;
    double dt_initial = 0.05;
    double dt_cap = 10.0;
    LinearSolveOptions linear{1e-13, 100000};
};

struct SteadyResult {
    DirectorField d;
    double residual = 0.0;
    int iterations = 0;
};

class steady_not_converged : public solver_error {
public:
    steady_not_converged(double residual, int iterations)
        : solver_error("steady director solve did not converge: residual " + std::to_string(residual) + " after " +
                       std::to_string(iterations) + " iterations"),
          last_residual(residual) {}
    double last_residual;
};

/// Solve Lap(d) = f(d), d = d0 on the walls, by pseudo-time marching with
/// director_step at u = 0. dt grows by 1.5x while the residual decreases,
/// halves when it increases, and is capped at `dt_cap`.
template <Penalty P>
SteadyResult solve_steady_director(std::shared_ptr<const BoundaryTrace> trace, const P& penalty, const Grid& grid,
                                   const SteadyOptions& opts = {},
                                   std::optional<DirectorField> initial = std::nullopt) {
    if (!(opts.tol > 0.0)) throw invalid_input("director.steady_tol must be positive");
    DirectorState state{initial ? *initial : DirectorField(grid), std::move(trace)};
    const VectorField zero(grid);
    const BoundarySpec bc = state.bc();
    double res = steady_residual(state.d, bc, penalty);
    double dt = opts.dt_initial;
    int it = 0;
    while (res > opts.tol) {
        if (it >= opts.max_iters) throw steady_not_converged(res, it);
        DirectorState next = director_step(state, zero, penalty, dt, opts.linear);
        const double next_res = steady_residual(next.d, bc, penalty);
        ++it;
        if (next_res < res) {
            state = std::move(next);
            res = next_res;
            dt = std::min(dt * 1.5, opts.dt_cap);
        } else {
            dt *= 0.5;
            if (dt < 1e-12) throw steady_not_converged(res, it);
        }
    }
    return {std::move(state.d), res, it};
}

struct ContinuityProbe {
    double sup_grad_distance = 0.0;     ///< sup_t ||grad(d1 - d2)||_{L2}
    double integrated_lap_distance = 0.0;  ///< int_0^T ||Lap(d1 - d2)||_{L2}^2 dt
    double velocity_distance = 0.0;     ///< ||u1 - u2||_inf
};

/// Evolve d[u1] and d[u2] from the same initial state with steady
/// velocities and measure how far the two director trajectories separate.
template <Penalty P>
ContinuityProbe probe_solution_operator_continuity(const DirectorState& initial, const VectorField& u1,
                                                   const VectorField& u2, const P& penalty, double T, double dt) {
    if (!(T > 0.0 && dt > 0.0)) throw invalid_input("probe requires T > 0 and dt > 0");
    ContinuityProbe probe;
    probe.velocity_distance = max_abs(u1 - u2);
    DirectorState a = initial, b = initial;
    const auto zero_bc = BoundarySpec::homogeneous_dirichlet();
    double t = 0.0;
    while (t < T - 1e-14) {
        const double step = std::min(dt, T - t);
        a = director_step(a, u1, penalty, step);
        b = director_step(b, u2, penalty, step);
        t += step;
        const DirectorField diff = a.d - b.d;
        probe.sup_grad_distance = std::max(probe.sup_grad_distance, h1_seminorm(diff, zero_bc));
        const double lap = lp_norm(laplacian(diff, zero_bc), 2.0);
        probe.integrated_lap_distance += step * lap * lap;
    }
    return probe;
}

}  // namespace nlc

#endif  // NLC_DIRECTOR_HPP
