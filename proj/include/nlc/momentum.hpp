#ifndef NLC_MOMENTUM_HPP
#define NLC_MOMENTUM_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "nlc/continuity.hpp"
#include "nlc/director.hpp"
#include "nlc/galerkin.hpp"
#include "nlc/operators.hpp"
#include "nlc/penalty.hpp"

namespace nlc {

/// Pressure a rho^gamma, viscosity mu, elastic coupling lambda, director
/// relaxation theta (fixed to 1 by the solver).
struct FluidParams {
    double a = 1.0;
    double gamma = 2.0;
    double mu = 1.0;
    double lambda = 1.0;
    double theta = 1.0;

    void validate() const {
        if (!(gamma > 1.5)) throw invalid_input("gamma must exceed 3/2");
        if (!(a > 0.0)) throw invalid_input("fluid.a must be positive");
        if (!(mu > 0.0)) throw invalid_input("fluid.mu must be positive");
        if (!(lambda > 0.0)) throw invalid_input("fluid.lambda must be positive");
        if (theta != 1.0) throw invalid_input("fluid.theta other than 1 is not supported");
    }
};

inline double pressure(double rho, const FluidParams& p, const RegularizationParams& reg) {
    double P = p.a * std::pow(rho, p.gamma);
    if (reg.delta > 0.0) P += reg.delta * std::pow(rho, reg.beta);
    return P;
}

/// Explicit Galerkin forcing F_i, one vector per velocity component:
///   int (rho u (x) u) : grad eta_i + int P(rho) div eta_i
///   - eps int (grad u . grad rho) . eta_i + lambda int T : grad eta_i
/// with T the Ericksen stress (the divergence moved onto the modes). P is
/// taken relative to its value in the first cell, which leaves the forcing
/// unchanged (int div eta_i = 0) and makes a uniform pressure exactly inert.
template <Penalty P>
std::vector<Eigen::VectorXd> momentum_forcing(const ScalarField& rho, const VelocityCoeffs& coeffs,
                                              const DirectorState& dir, const FluidParams& params,
                                              const RegularizationParams& reg, const P& penalty,
                                              const GalerkinBasis& basis) {
    const Grid& g = rho.grid();
    const int dim = g.dim;
    const std::size_t N = g.cells();
    const VectorField u = basis.realize(coeffs);
    const auto r = rho.component(0);

    std::vector<double> Pcell(N);
    const double P_ref = pressure(r[0], params, reg);
    for (std::size_t i = 0; i < N; ++i) Pcell[i] = pressure(r[i], params, reg) - P_ref;
    const auto T = ericksen_stress(dir.d, dir.bc(), penalty);

    std::vector<std::vector<std::vector<double>>> grad_u;
    VectorField grad_rho;
    if (reg.eps > 0.0) {
        grad_u = basis.realize_gradient(coeffs);
        grad_rho = gradient(rho, BoundarySpec::neumann());
    }

    std::vector<Eigen::VectorXd> F(dim);
    std::vector<double> work(N);
    for (int c = 0; c < dim; ++c) {
        F[c] = basis.project_scalar(Pcell, c);
        for (int a = 0; a < dim; ++a) {
            for (std::size_t i = 0; i < N; ++i) work[i] = r[i] * u(c, i) * u(a, i) + params.lambda * T[a][c][i];
            F[c] += basis.project_scalar(work, a);
        }
        if (reg.eps > 0.0) {
            for (std::size_t i = 0; i < N; ++i) {
                double friction = 0.0;
                for (int a = 0; a < dim; ++a) friction += grad_u[c][a][i] * grad_rho(a, i);
                work[i] = -reg.eps * friction;
            }
            F[c] += basis.project_scalar(work);
        }
    }
    return F;
}

/// Backward-Euler step of the weak momentum balance in the density-weighted
/// pairing:
///   (M[rho_new] + dt mu K) c_new = M[rho_old] c_old + dt F(old state, d_new)
/// `convect`, when given, replaces c_old inside F (Picard sweeps).
template <Penalty P>
VelocityCoeffs momentum_step(const ScalarField& rho_old, const ScalarField& rho_new, const VelocityCoeffs& coeffs_old,
                             const DirectorState& d_new, const FluidParams& params, const RegularizationParams& reg,
                             const P& penalty, const GalerkinBasis& basis, double dt,
                             const VelocityCoeffs* convect = nullptr) {
    const Grid& g = rho_old.grid();
    if (!(dt > 0.0)) throw invalid_input("momentum_step requires dt > 0");
    const VectorField u_old = basis.realize(coeffs_old);
    if (dt * max_speed(u_old) > g.min_spacing()) throw solver_error("CFL violated in momentum step");

    const auto F = momentum_forcing(rho_old, convect ? *convect : coeffs_old, d_new, params, reg, penalty, basis);
    const Eigen::MatrixXd M_old = basis.weighted_gram(rho_old.component(0));
    const Eigen::MatrixXd A = basis.weighted_gram(rho_new.component(0)) + dt * params.mu * basis.stiffness_block();
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw solver_error("momentum system is singular (vacuum over the basis support?)");

    const int B = basis.block_size();
    VelocityCoeffs out = basis.zero_coeffs();
    for (int c = 0; c < g.dim; ++c) {
        Eigen::Map<const Eigen::VectorXd> cold(coeffs_old.c.data() + c * B, B);
        Eigen::VectorXd rhs = M_old * cold + dt * F[c];
        Eigen::VectorXd x = llt.solve(rhs);
        for (int K = 0; K < B; ++K) out.c[c * B + K] = x[K];
    }
    for (double v : out.c)
        if (!std::isfinite(v)) throw solver_error("non-finite velocity coefficients after momentum step");
    return out;
}

/// Residual of the weak momentum balance tested against every mode,
/// re-assembled on the grid (pointwise rho u products and realized velocity
/// gradients) rather than through the Gram matrices used by the solve.
/// Returned relative to the largest individual term.
template <Penalty P>
double momentum_residual(const ScalarField& rho_old, const ScalarField& rho_new, const VelocityCoeffs& coeffs_old,
                         const VelocityCoeffs& coeffs_new, const DirectorState& d_new, const FluidParams& params,
                         const RegularizationParams& reg, const P& penalty, const GalerkinBasis& basis, double dt,
                         const VelocityCoeffs* convect = nullptr) {
    const Grid& g = rho_old.grid();
    const std::size_t N = g.cells();
    const auto F = momentum_forcing(rho_old, convect ? *convect : coeffs_old, d_new, params, reg, penalty, basis);
    const VectorField u_old = basis.realize(coeffs_old);
    const VectorField u_new = basis.realize(coeffs_new);
    const auto grad_new = basis.realize_gradient(coeffs_new);

    double max_res = 0.0, scale = 0.0;
    std::vector<double> w(N);
    for (int c = 0; c < g.dim; ++c) {
        for (std::size_t i = 0; i < N; ++i) w[i] = rho_new(0, i) * u_new(c, i);
        const Eigen::VectorXd m_new = basis.project_scalar(w);
        for (std::size_t i = 0; i < N; ++i) w[i] = rho_old(0, i) * u_old(c, i);
        const Eigen::VectorXd m_old = basis.project_scalar(w);
        Eigen::VectorXd visc = Eigen::VectorXd::Zero(basis.block_size());
        for (int a = 0; a < g.dim; ++a) visc += basis.project_scalar(grad_new[c][a], a);
        visc *= dt * params.mu;
        const Eigen::VectorXd force = dt * F[c];
        const Eigen::VectorXd res = m_new + visc - m_old - force;
        max_res = std::max(max_res, res.cwiseAbs().maxCoeff());
        scale = std::max({scale, m_new.cwiseAbs().maxCoeff(), visc.cwiseAbs().maxCoeff(),
                          m_old.cwiseAbs().maxCoeff(), force.cwiseAbs().maxCoeff()});
    }
    return scale > 0.0 ? max_res / scale : 0.0;
}

}  // namespace nlc

#endif  // NLC_MOMENTUM_HPP
