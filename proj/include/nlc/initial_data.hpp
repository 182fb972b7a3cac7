#ifndef NLC_INITIAL_DATA_HPP
#define NLC_INITIAL_DATA_HPP

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "nlc/config.hpp"
#include "nlc/director.hpp"
#include "nlc/galerkin.hpp"
#include "nlc/grid.hpp"

namespace nlc {

struct InitialData {
    ScalarField rho0;
    VectorField m0;
    DirectorField d0;
    std::shared_ptr<const BoundaryTrace> trace;
    ScalarField rho_delta;
    VectorField m_delta;
    double clipped_measure = 0.0;  ///< |{rho_delta < rho0}|
};

/// In-plane director at angle trace_angle + trace_twist * x / Lx.
inline Vec3 trace_director(const SimConfig& c, const Vec3& x) {
    double theta = c.initial.trace_angle;
    if (c.initial.trace == "rotating") theta += c.initial.trace_twist * x[0] / c.grid.extent[0];
    return {std::cos(theta), std::sin(theta), 0.0};
}

/// Sum of low sine modes with uniform random amplitudes, one independent
/// field per component; vanishes on the walls.
template <FieldKind Kind>
Field<Kind> smooth_noise(const Grid& g, int modes, std::mt19937_64& rng) {
    Field<Kind> out(g);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::array<int, 3> kmax{1, 1, 1};
    for (int a = 0; a < g.dim; ++a) kmax[a] = modes;
    double norm = 1.0;
    for (int a = 0; a < g.dim; ++a) norm *= modes;
    for (int c = 0; c < out.components(); ++c) {
        for (int k2 = 1; k2 <= kmax[2]; ++k2)
            for (int k1 = 1; k1 <= kmax[1]; ++k1)
                for (int k0 = 1; k0 <= kmax[0]; ++k0) {
                    const double amp = U(rng) / norm;
                    const std::array<int, 3> k{k0, k1, k2};
                    for (std::size_t i = 0; i < g.cells(); ++i) {
                        const Vec3 x = g.position(i);
                        double s = amp;
                        for (int a = 0; a < g.dim; ++a) s *= std::sin(k[a] * std::numbers::pi * x[a] / g.extent[a]);
                        out(c, i) += s;
                    }
                }
    }
    return out;
}

/// Profiles:
///   rest             rho = rho_mean, m = 0, d from the trace formula
///   bump             rho = rho_mean + A exp(-|x - x_c|^2 / (2 w^2)), m = 0
///   shear            rho = rho_mean, u_0 = A sin(pi x/Lx) sin(2 pi y/Ly)
///   random-director  rho = rho_mean, m = 0, d = unit-normalised trace
///                    formula plus smooth random modes
/// A positive vacuum_radius empties the ball of that radius around the bump
/// centre. `steady_director`, when given, replaces the trace formula as the
/// base director (perturbed by director_noise).
inline InitialData build_initial_data(const SimConfig& c, const Grid& g,
                                      const DirectorField* steady_director = nullptr) {
    const auto& ic = c.initial;
    std::mt19937_64 rng(ic.seed);
    InitialData out;
    out.trace = std::make_shared<const BoundaryTrace>(
        BoundaryTrace::from_function(g, 3, [&](const Vec3& x) { return trace_director(c, x); }));

    out.rho0 = sample<FieldKind::scalar>(g, [&](const Vec3& x) {
        double r = ic.rho_mean;
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) r2 += (x[a] - ic.bump_center[a]) * (x[a] - ic.bump_center[a]);
        if (ic.profile == "bump") r += ic.bump_amplitude * std::exp(-r2 / (2.0 * ic.bump_width * ic.bump_width));
        if (ic.vacuum_radius > 0.0 && std::sqrt(r2) < ic.vacuum_radius) r = 0.0;
        return r;
    });
    for (double r : out.rho0.data())
        if (!(r >= 0.0)) throw invalid_input("initial profile '" + ic.profile + "' produces negative density");

    out.m0 = VectorField(g);
    if (ic.profile == "shear") {
        for (std::size_t i = 0; i < g.cells(); ++i) {
            const Vec3 x = g.position(i);
            const double u = ic.shear_amplitude * std::sin(std::numbers::pi * x[0] / g.extent[0]) *
                             std::sin(2.0 * std::numbers::pi * x[1] / g.extent[1]);
            out.m0(0, i) = out.rho0(0, i) * u;
        }
    }

    if (steady_director) {
        out.d0 = *steady_director;
    } else {
        out.d0 = sample<FieldKind::director>(g, [&](const Vec3& x) { return trace_director(c, x); });
    }
    if (ic.profile == "random-director" || steady_director) {
        const auto noise = smooth_noise<FieldKind::director>(g, ic.director_modes, rng);
        for (std::size_t i = 0; i < g.cells(); ++i) {
            Vec3 d = director_at(out.d0, i);
            for (int k = 0; k < 3; ++k) d[k] += ic.director_noise * noise(k, i);
            if (ic.profile == "random-director") {
                const double n = std::sqrt(norm2(d));
                if (n > 0.0)
                    for (double& v : d) v /= n;
            }
            set_director(out.d0, i, d);
        }
    }

    out.rho_delta = out.rho0;
    out.m_delta = out.m0;
    const double delta = c.reg.delta;
    if (delta > 0.0) {
        const double upper = std::pow(delta, -1.0 / (2.0 * c.reg.beta));
        if (delta > upper) throw invalid_input("reg.delta too large: delta exceeds delta^(-1/(2 beta))");
        for (std::size_t i = 0; i < g.cells(); ++i) {
            const double r0 = out.rho0(0, i);
            const double rd = std::clamp(r0, delta, upper);
            out.rho_delta(0, i) = rd;
            if (rd < r0) {
                out.clipped_measure += g.cell_volume();
                for (int a = 0; a < g.dim; ++a) out.m_delta(a, i) = 0.0;
            }
        }
    }
    return out;
}

/// Pointwise check of the modified-data invariants; returns an empty
/// string when they hold.
inline std::string check_initial_invariants(const InitialData& d, const RegularizationParams& reg) {
    const Grid& g = d.rho0.grid();
    for (std::size_t i = 0; i < g.cells(); ++i) {
        const double r0 = d.rho0(0, i), rd = d.rho_delta(0, i);
        if (r0 == 0.0)
            for (int a = 0; a < g.dim; ++a)
                if (d.m0(a, i) != 0.0) return "m0 nonzero in vacuum at cell " + std::to_string(i);
        if (reg.delta > 0.0) {
            if (rd < reg.delta || rd > std::pow(reg.delta, -1.0 / (2.0 * reg.beta)))
                return "rho_delta outside [delta, delta^(-1/(2 beta))] at cell " + std::to_string(i);
            if (rd < r0)
                for (int a = 0; a < g.dim; ++a)
                    if (d.m_delta(a, i) != 0.0) return "m_delta nonzero where rho_delta < rho0 at cell " + std::to_string(i);
        }
    }
    return {};
}

/// Initial Galerkin velocity: solve M[rho] c = int m . eta_i.
inline VelocityCoeffs initial_coefficients(const ScalarField& rho, const VectorField& m, const GalerkinBasis& basis) {
    VelocityCoeffs out = basis.zero_coeffs();
    bool any = false;
    for (double v : m.data()) any = any || v != 0.0;
    if (!any) return out;
    Eigen::LLT<Eigen::MatrixXd> llt(basis.weighted_gram(rho.component(0)));
    if (llt.info() != Eigen::Success) throw solver_error("initial momentum cannot be represented: singular mass matrix");
    const int B = basis.block_size();
    for (int comp = 0; comp < basis.grid().dim; ++comp) {
        const Eigen::VectorXd x = llt.solve(basis.project_scalar(m.component(comp)));
        for (int K = 0; K < B; ++K) out.c[comp * B + K] = x[K];
    }
    return out;
}

}  // namespace nlc

#endif  // NLC_INITIAL_DATA_HPP
