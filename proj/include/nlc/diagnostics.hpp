#ifndef NLC_DIAGNOSTICS_HPP
#define NLC_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "nlc/continuity.hpp"
#include "nlc/director.hpp"
#include "nlc/galerkin.hpp"
#include "nlc/momentum.hpp"
#include "nlc/operators.hpp"
#include "nlc/penalty.hpp"

namespace nlc {

/// Density, Galerkin velocity and director at one instant.
struct FlowState {
    ScalarField rho;
    VelocityCoeffs coeffs;
    DirectorState dir;
    double t = 0.0;
};

struct EnergyReport {
    double kinetic = 0.0;               ///< int rho |u|^2 / 2
    double pressure_potential = 0.0;    ///< int a rho^gamma / (gamma - 1)
    double artificial_potential = 0.0;  ///< int delta rho^beta / (beta - 1)
    double elastic = 0.0;               ///< int lambda |grad d|^2 / 2
    double penalty_potential = 0.0;     ///< int lambda F(d)
    double total = 0.0;
    double dissipation_viscous = 0.0;     ///< mu int |grad u|^2
    double dissipation_director = 0.0;    ///< lambda int |Lap d - f(d)|^2
    double dissipation_artificial = 0.0;  ///< eps int (gamma rho^(gamma-2) + delta beta rho^(beta-2)) |grad rho|^2

    double sum_of_parts() const {
        return kinetic + pressure_potential + artificial_potential + elastic + penalty_potential;
    }
    double dissipation() const { return dissipation_viscous + dissipation_director + dissipation_artificial; }
};

inline double total_mass(const ScalarField& rho) {
    double m = 0.0;
    for (double v : rho.component(0)) m += v;
    return m * rho.grid().cell_volume();
}

inline double max_director_norm(const DirectorField& d) {
    double m = 0.0;
    for (std::size_t i = 0; i < d.cells(); ++i) m = std::max(m, norm2(director_at(d, i)));
    return std::sqrt(m);
}

/// Clip harmless rounding undershoot; abort on genuine negative density.
inline double checked_density(double r, double scale) {
    if (r >= 0.0) return r;
    if (r >= -1e-14 * std::max(scale, 1.0)) return 0.0;
    throw solver_error("negative density " + std::to_string(r) + " in diagnostics");
}

inline double max_value(const ScalarField& s) {
    double m = 0.0;
    for (double v : s.component(0)) m = std::max(m, std::abs(v));
    return m;
}

/// Energy and instantaneous dissipation rates of a state, by midpoint
/// quadrature. The elastic term uses the face-based Dirichlet integral and
/// the artificial dissipation its divided-difference form on faces,
///   eps * sum_faces (G'(rho_R) - G'(rho_L)) (rho_R - rho_L) / h^2,
/// with G the pressure potential; both are the exact discrete counterparts
/// of the implicit operators in the step.
template <Penalty P>
EnergyReport energy(const FlowState& s, const GalerkinBasis& basis, const FluidParams& params,
                    const RegularizationParams& reg, const P& penalty) {
    if (!(params.gamma > 1.0)) throw invalid_input("energy requires gamma > 1");
    const Grid& g = s.rho.grid();
    const double vol = g.cell_volume();
    const std::size_t N = g.cells();
    const double scale = max_value(s.rho);
    const bool art = reg.delta > 0.0;

    EnergyReport e;
    const VectorField u = basis.realize(s.coeffs);
    const auto grad_u = basis.realize_gradient(s.coeffs);
    std::vector<double> dG(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double r = checked_density(s.rho(0, i), scale);
        double u2 = 0.0;
        for (int c = 0; c < g.dim; ++c) u2 += u(c, i) * u(c, i);
        e.kinetic += 0.5 * r * u2;
        e.pressure_potential += params.a * std::pow(r, params.gamma) / (params.gamma - 1.0);
        if (art) e.artificial_potential += reg.delta * std::pow(r, reg.beta) / (reg.beta - 1.0);
        e.penalty_potential += params.lambda * penalty.value(director_at(s.dir.d, i));
        double gu2 = 0.0;
        for (int c = 0; c < g.dim; ++c)
            for (int a = 0; a < g.dim; ++a) gu2 += grad_u[c][a][i] * grad_u[c][a][i];
        e.dissipation_viscous += params.mu * gu2;
        dG[i] = params.a * params.gamma * std::pow(r, params.gamma - 1.0) / (params.gamma - 1.0);
        if (art) dG[i] += reg.delta * reg.beta * std::pow(r, reg.beta - 1.0) / (reg.beta - 1.0);
    }
    e.kinetic *= vol;
    e.pressure_potential *= vol;
    e.artificial_potential *= vol;
    e.penalty_potential *= vol;
    e.dissipation_viscous *= vol;

    const BoundarySpec bc = s.dir.bc();
    for (int c = 0; c < 3; ++c) e.elastic += dirichlet_integral(s.dir.d.component(c), g, bc, c);
    e.elastic *= 0.5 * params.lambda;

    const double dres = lp_norm(director_residual_field(s.dir.d, bc, penalty), 2.0);
    e.dissipation_director = params.lambda * dres * dres;

    if (reg.eps > 0.0) {
        double acc = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            const std::size_t st = g.stride(a);
            const double h2 = g.spacing[a] * g.spacing[a];
            for (std::size_t idx = 0; idx < N; ++idx) {
                if (detail::axis_index(g, idx, a) == g.count[a] - 1) continue;
                acc += (dG[idx + st] - dG[idx]) * (s.rho(0, idx + st) - s.rho(0, idx)) / h2;
            }
        }
        e.dissipation_artificial = reg.eps * acc * vol;
    }
    e.total = e.sum_of_parts();
    return e;
}

/// | (E_{k+1} - E_k) / dt + D_{k+1} |: discrete defect of the energy equality.
inline double energy_balance_residual(const EnergyReport& before, const EnergyReport& after, double dt) {
    return std::abs((after.total - before.total) / dt + after.dissipation());
}

/// a rho^gamma + delta rho^beta - mu div u, pointwise.
inline ScalarField effective_viscous_flux(const ScalarField& rho, const VectorField& u, const FluidParams& params,
                                          const RegularizationParams& reg) {
    const ScalarField div = divergence(u);
    ScalarField out(rho.grid());
    for (std::size_t i = 0; i < rho.cells(); ++i)
        out(0, i) = pressure(rho(0, i), params, reg) - params.mu * div(0, i);
    return out;
}

/// div(grad d (.) grad d) - grad(|grad d|^2 / 2) - (grad d)^T Lap d, cellwise.
/// Vanishes for smooth d; on the grid it measures the consistency of the
/// discrete stress divergence with the director equation.
inline VectorField stress_identity_defect(const DirectorField& d, const BoundarySpec& bc) {
    const Grid& g = d.grid();
    VectorField out = ericksen_stress_divergence(d, bc, ZeroPenalty());
    const auto J = jacobian(d, bc);
    for (int m = 0; m < 3; ++m) {
        const auto lap = laplacian(d.component(m), g, bc, m);
        for (int b = 0; b < g.dim; ++b)
            for (std::size_t i = 0; i < g.cells(); ++i) out(b, i) -= J[m][b][i] * lap[i];
    }
    return out;
}

/// Renormalizing function b for the renormalized continuity residual.
struct Renormalization {
    enum class Kind { identity, truncation, entropy };
    Kind kind = Kind::identity;
    double k = 1.0;          ///< truncation level for T_k
    double shift = 1e-12;    ///< log shift for z log z

    static Renormalization identity() { return {Kind::identity, 1.0, 1e-12}; }
    static Renormalization truncation(double level) {
        if (!(level > 0.0)) throw invalid_input("truncation level must be positive");
        return {Kind::truncation, level, 1e-12};
    }
    static Renormalization entropy(double shift = 1e-12) { return {Kind::entropy, 1.0, shift}; }
    /// "identity", "truncation" (level `k`) or "entropy".
    static Renormalization named(std::string_view id, double k = 1.0) {
        if (id == "identity") return identity();
        if (id == "truncation") return truncation(k);
        if (id == "entropy") return entropy();
        throw invalid_input("unknown renormalization '" + std::string(id) + "'");
    }

    /// Smooth concave cut-off: T(z) = z for z <= 1, T(z) = 2 for z >= 3,
    /// T' = 1 - S((z-1)/2) in between with S the cubic smoothstep.
    static double T(double z) {
        if (z <= 1.0) return z;
        if (z >= 3.0) return 2.0;
        const double s = 0.5 * (z - 1.0);
        return 1.0 + 2.0 * (s - s * s * s + 0.5 * s * s * s * s);
    }
    static double dT(double z) {
        if (z <= 1.0) return 1.0;
        if (z >= 3.0) return 0.0;
        const double s = 0.5 * (z - 1.0);
        return 1.0 - s * s * (3.0 - 2.0 * s);
    }
    static double d2T(double z) {
        if (z <= 1.0 || z >= 3.0) return 0.0;
        const double s = 0.5 * (z - 1.0);
        return -3.0 * s * (1.0 - s);
    }

    double value(double z) const {
        switch (kind) {
        case Kind::identity: return z;
        case Kind::truncation: return k * T(z / k);
        case Kind::entropy: return z * std::log(z + shift);
        }
        return z;
    }
    double derivative(double z) const {
        switch (kind) {
        case Kind::identity: return 1.0;
        case Kind::truncation: return dT(z / k);
        case Kind::entropy: return std::log(z + shift) + z / (z + shift);
        }
        return 1.0;
    }
    double second_derivative(double z) const {
        switch (kind) {
        case Kind::identity: return 0.0;
        case Kind::truncation: return d2T(z / k) / k;
        case Kind::entropy: return 1.0 / (z + shift) + shift / ((z + shift) * (z + shift));
        }
        return 0.0;
    }
};

/// Weak residual of the renormalized regularized continuity equation
///   b(rho)_t + div(b(rho) u) + (b'(rho) rho - b(rho)) div u
///     = eps (Lap b(rho) - b''(rho) |grad rho|^2)
/// tested with `phi`, using the same upwind fluxes and face divergence as
/// continuity_step (transport at rho_k, diffusion at rho_{k+1}).
inline double renormalized_residual(const ScalarField& rho_k, const ScalarField& rho_k1, const VectorField& u,
                                    const Renormalization& b, const ScalarField& phi, double dt, double eps) {
    const Grid& g = rho_k.grid();
    const std::size_t N = g.cells();
    std::vector<double> b0(N), b1(N), defect(N);
    for (std::size_t i = 0; i < N; ++i) {
        b0[i] = b.value(rho_k(0, i));
        b1[i] = b.value(rho_k1(0, i));
        defect[i] = b.derivative(rho_k(0, i)) * rho_k(0, i) - b0[i];
    }
    const auto flux_div = upwind_flux_divergence(b0, u);
    const auto div_u = face_divergence(u);
    const auto lap_b = laplacian(std::span<const double>(b1), g, BoundarySpec::neumann());
    const VectorField grad_rho = gradient(rho_k1, BoundarySpec::neumann());

    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double grad2 = 0.0;
        for (int a = 0; a < g.dim; ++a) grad2 += grad_rho(a, i) * grad_rho(a, i);
        const double diffusion = eps * (lap_b[i] - b.second_derivative(rho_k1(0, i)) * grad2);
        acc += phi(0, i) * ((b1[i] - b0[i]) / dt + flux_div[i] + defect[i] * div_u[i] - diffusion);
    }
    return std::abs(acc * g.cell_volume());
}

/// Plain weak continuity residual, written in flux form:
///   int (rho_{k+1} - rho_k)/dt phi - sum_faces F (phi_R - phi_L)/h dV
///   + eps sum_faces (rho_R - rho_L)(phi_R - phi_L)/h^2 dV
inline double continuity_weak_residual(const ScalarField& rho_k, const ScalarField& rho_k1, const VectorField& u,
                                       const ScalarField& phi, double dt, double eps) {
    const Grid& g = rho_k.grid();
    double acc = 0.0;
    for (std::size_t i = 0; i < g.cells(); ++i) acc += phi(0, i) * (rho_k1(0, i) - rho_k(0, i)) / dt;
    for (int a = 0; a < g.dim; ++a) {
        const std::size_t s = g.stride(a);
        const double h = g.spacing[a];
        for (std::size_t idx = 0; idx < g.cells(); ++idx) {
            if (detail::axis_index(g, idx, a) == g.count[a] - 1) continue;
            const double w = face_velocity(u, a, idx);
            const double F = w * (w > 0.0 ? rho_k(0, idx) : rho_k(0, idx + s));
            const double dphi = (phi(0, idx + s) - phi(0, idx)) / h;
            acc -= F * dphi;
            acc += eps * (rho_k1(0, idx + s) - rho_k1(0, idx)) / h * dphi;
        }
    }
    return std::abs(acc * g.cell_volume());
}

/// int rho^(gamma + sigma)
inline double density_integrability(const ScalarField& rho, double gamma, double sigma) {
    if (!(sigma > 0.0)) throw invalid_input("density_integrability requires sigma > 0");
    const double scale = max_value(rho);
    double acc = 0.0;
    for (double r : rho.component(0)) acc += std::pow(checked_density(r, scale), gamma + sigma);
    return acc * rho.grid().cell_volume();
}

/// int delta rho^beta
inline double artificial_pressure_integral(const ScalarField& rho, const RegularizationParams& reg) {
    if (reg.delta == 0.0) return 0.0;
    double acc = 0.0;
    for (double r : rho.component(0)) acc += std::pow(std::max(r, 0.0), reg.beta);
    return reg.delta * acc * rho.grid().cell_volume();
}

/// Constant density rho_s = mass/|Omega|, u_s = 0 and the steady director.
struct SteadyReference {
    double rho_s = 0.0;
    DirectorField d_s;
    double residual = 0.0;
    double mass = 0.0;
};

template <Penalty P>
SteadyReference build_steady_reference(double mass, std::shared_ptr<const BoundaryTrace> trace, const P& penalty,
                                       const Grid& grid, const SteadyOptions& opts = {},
                                       std::optional<DirectorField> guess = std::nullopt) {
    auto sol = solve_steady_director(std::move(trace), penalty, grid, opts, std::move(guess));
    return {mass / grid.volume(), std::move(sol.d), sol.residual, mass};
}

/// || lambda div(Ericksen stress)(d_s) ||_{L2}: the steady momentum balance
/// at constant density, zero for the continuum steady state.
template <Penalty P>
double steady_stress_residual(const SteadyReference& ref, const BoundarySpec& bc, const P& penalty, double lambda) {
    return lambda * lp_norm(ericksen_stress_divergence(ref.d_s, bc, penalty), 2.0);
}

struct LargeTimeMetrics {
    double rho_distance = 0.0;  ///< ||rho - rho_s||_{L^gamma}
    double u_norm = 0.0;        ///< ||u||_{L2}
    double d_distance = 0.0;    ///< ||d - d_s||_{L2} + ||grad(d - d_s)||_{L2}
};

inline LargeTimeMetrics large_time_metrics(const FlowState& s, const SteadyReference& ref, const GalerkinBasis& basis,
                                           double gamma) {
    const double mass = total_mass(s.rho);
    if (std::abs(mass - ref.mass) > 1e-8 * std::max(1.0, std::abs(ref.mass)))
        throw invalid_input("large_time_metrics: state mass " + std::to_string(mass) +
                            " does not match the steady reference mass " + std::to_string(ref.mass));
    LargeTimeMetrics m;
    ScalarField drho = s.rho;
    for (double& v : drho.data()) v -= ref.rho_s;
    m.rho_distance = lp_norm(drho, gamma);
    bool zero = true;
    for (double c : s.coeffs.c) zero = zero && c == 0.0;
    m.u_norm = zero ? 0.0 : lp_norm(basis.realize(s.coeffs), 2.0);
    const DirectorField dd = s.dir.d - ref.d_s;
    m.d_distance = lp_norm(dd, 2.0) + h1_seminorm(dd, BoundarySpec::homogeneous_dirichlet());
    return m;
}

}  // namespace nlc

#endif  // NLC_DIAGNOSTICS_HPP
