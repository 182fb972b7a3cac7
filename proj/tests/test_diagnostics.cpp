#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlc/diagnostics.hpp"

using namespace nlc;
using std::numbers::pi;

namespace {

ScalarField uniform(const Grid& g, double v) {
    ScalarField r(g);
    for (double& x : r.data()) x = v;
    return r;
}

DirectorState from_function(const Grid& g, const std::function<Vec3(const Vec3&)>& fn) {
    return {sample<FieldKind::director>(g, fn),
            std::make_shared<const BoundaryTrace>(BoundaryTrace::from_function(g, 3, fn))};
}

ScalarField random_positive(const Grid& g, unsigned seed, double lo, double hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(lo, hi);
    ScalarField r(g);
    for (double& x : r.data()) x = U(rng);
    return r;
}

VectorField random_velocity(const Grid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N;
    VectorField u(g);
    for (double& x : u.data()) x = N(rng);
    return u;
}

}  // namespace

TEST(Diagnostics, MassAndMaxNorm) {
    const Grid g = unit_grid(2, 16);
    EXPECT_NEAR(total_mass(uniform(g, 1.5)), 1.5, 1e-14);
    DirectorField d(g);
    set_director(d, 7, {0, 0, 2});
    EXPECT_DOUBLE_EQ(max_director_norm(d), 2.0);
}

TEST(Diagnostics, EnergyOfRestStateAndConsistency) {
    const Grid g = unit_grid(2, 16);
    const GalerkinBasis b(g, 4);
    const FluidParams fp;
    const RegularizationParams reg{0.0, 0.01, 13.0};
    const FlowState s{uniform(g, 1.0), b.zero_coeffs(), from_function(g, [](const Vec3&) { return Vec3{1, 0, 0}; }), 0.0};
    const auto e = energy(s, b, fp, reg, GinzburgLandauPenalty());
    EXPECT_DOUBLE_EQ(e.kinetic, 0.0);
    EXPECT_NEAR(e.pressure_potential, 1.0 / (fp.gamma - 1.0), 1e-13);
    EXPECT_NEAR(e.artificial_potential, 0.01 / 12.0, 1e-15);
    EXPECT_NEAR(e.elastic, 0.0, 1e-14);
    EXPECT_NEAR(e.penalty_potential, 0.0, 1e-14);
    EXPECT_EQ(e.total, e.sum_of_parts());
    EXPECT_NEAR(e.dissipation(), 0.0, 1e-12);
    EXPECT_NEAR(energy_balance_residual(e, e, 0.01), 0.0, 1e-10);
}

TEST(Diagnostics, KineticEnergyOfSingleMode) {
    const Grid g = unit_grid(2, 32);
    const GalerkinBasis b(g, 2);
    VelocityCoeffs c = b.zero_coeffs();
    c.c[0] = 2.0;  // u_x = 2 sin(pi x) sin(pi y)
    const FlowState s{uniform(g, 3.0), c, from_function(g, [](const Vec3&) { return Vec3{1, 0, 0}; }), 0.0};
    FluidParams fp;
    fp.mu = 0.5;
    const auto e = energy(s, b, fp, RegularizationParams{}, ZeroPenalty());
    EXPECT_NEAR(e.kinetic, 0.5 * 3.0 * 4.0 * 0.25, 1e-12);
    EXPECT_NEAR(e.dissipation_viscous, 0.5 * 4.0 * 2.0 * pi * pi * 0.25, 1e-10);
}

TEST(Diagnostics, HeatFlowBalanceIsFirstOrder) {
    const Grid g = unit_grid(2, 32);
    const GalerkinBasis b(g, 2);
    const auto dir = from_function(g, [](const Vec3& x) {
        const double th = 0.8 * std::sin(pi * x[0]) * std::sin(2 * pi * x[1]) + 0.3 * x[0];
        return Vec3{std::cos(th), std::sin(th), 0.1 * std::sin(pi * x[1])};
    });
    const FluidParams fp;
    const RegularizationParams reg;
    const GinzburgLandauPenalty pen(0.5);
    const VectorField zero(g);
    const FlowState s0{uniform(g, 1.0), b.zero_coeffs(), dir, 0.0};
    const auto e0 = energy(s0, b, fp, reg, pen);
    double prev = 0.0;
    for (double dt : {4e-4, 2e-4, 1e-4}) {
        const FlowState s1{uniform(g, 1.0), b.zero_coeffs(), director_step(dir, zero, pen, dt), dt};
        const auto e1 = energy(s1, b, fp, reg, pen);
        EXPECT_LT(e1.total, e0.total);
        const double r = energy_balance_residual(e0, e1, dt);
        if (prev > 0.0) { EXPECT_GT(prev / r, 1.7); }
        prev = r;
    }
}

TEST(Diagnostics, EffectiveViscousFlux) {
    const Grid g = unit_grid(2, 8);
    FluidParams fp;
    fp.a = 2.0;
    fp.mu = 0.5;
    const RegularizationParams reg{0.0, 0.1, 4.0};
    const auto rest = effective_viscous_flux(uniform(g, 1.0), VectorField(g), fp, reg);
    for (double v : rest.data()) EXPECT_NEAR(v, 2.1, 1e-14);
    VectorField u(g);
    for (std::size_t i = 0; i < g.cells(); ++i) u(0, i) = 3.0 * g.position(i)[0];
    const auto stretched = effective_viscous_flux(uniform(g, 1.0), u, fp, reg);
    for (double v : stretched.data()) EXPECT_NEAR(v, 2.1 - 1.5, 1e-12);
}

TEST(Renormalization, CutoffShape) {
    using R = Renormalization;
    EXPECT_EQ(R::T(0.5), 0.5);
    EXPECT_EQ(R::T(1.0), 1.0);
    EXPECT_EQ(R::T(3.0), 2.0);
    EXPECT_EQ(R::T(10.0), 2.0);
    for (double z = 0.0; z < 4.0; z += 0.01) {
        EXPECT_LE(R::d2T(z), 0.0);
        EXPECT_NEAR((R::T(z + 1e-6) - R::T(z - 1e-6)) / 2e-6, R::dT(z), 1e-6);
        EXPECT_NEAR((R::dT(z + 1e-6) - R::dT(z - 1e-6)) / 2e-6, R::d2T(z), 1e-5);
    }
    const auto t = R::truncation(2.0);
    EXPECT_EQ(t.value(1.5), 1.5);
    EXPECT_EQ(t.value(100.0), 4.0);
    EXPECT_THROW(R::truncation(0.0), invalid_input);
    EXPECT_THROW(R::named("cube"), invalid_input);
    EXPECT_EQ(R::named("entropy").kind, R::Kind::entropy);
}

TEST(Renormalization, IdentityMatchesWeakContinuityResidual) {
    const Grid g = make_grid(2, {1.0, 1.0}, {12, 14});
    const auto r0 = random_positive(g, 1, 0.5, 2.0), r1 = random_positive(g, 2, 0.5, 2.0);
    const auto phi = random_positive(g, 3, -1.0, 1.0);
    const auto u = random_velocity(g, 4);
    const double a = renormalized_residual(r0, r1, u, Renormalization::identity(), phi, 1e-2, 0.3);
    const double w = continuity_weak_residual(r0, r1, u, phi, 1e-2, 0.3);
    EXPECT_GT(w, 1.0);
    EXPECT_NEAR(a, w, 1e-12 * w);
    const double t = renormalized_residual(r0, r1, u, Renormalization::truncation(5.0), phi, 1e-2, 0.3);
    EXPECT_NEAR(t, w, 1e-12 * w);
}

TEST(Renormalization, VanishesForConstantDensityAtRest) {
    const Grid g = unit_grid(2, 10);
    const auto phi = random_positive(g, 3, -1.0, 1.0);
    const auto rho = uniform(g, 1.7);
    for (const auto& b : {Renormalization::identity(), Renormalization::truncation(1.0), Renormalization::entropy()})
        EXPECT_EQ(renormalized_residual(rho, rho, VectorField(g), b, phi, 0.1, 0.2), 0.0);
}

TEST(Renormalization, ContinuityStepHasSmallWeakResidual) {
    const Grid g = unit_grid(2, 24);
    const auto r0 = random_positive(g, 8, 0.5, 1.5);
    VectorField u(g);
    for (std::size_t i = 0; i < g.cells(); ++i) {
        const Vec3 x = g.position(i);
        u(0, i) = std::sin(pi * x[0]) * std::cos(pi * x[1]);
        u(1, i) = -std::cos(pi * x[0]) * std::sin(pi * x[1]);
    }
    const auto r1 = continuity_step(r0, u, 0.05, 1e-3);
    const auto phi = random_positive(g, 9, -1.0, 1.0);
    EXPECT_LT(renormalized_residual(r0, r1, u, Renormalization::identity(), phi, 1e-3, 0.05), 1e-9);
    EXPECT_LT(continuity_weak_residual(r0, r1, u, phi, 1e-3, 0.05), 1e-9);
}

TEST(Diagnostics, DensityIntegrability) {
    const Grid g = unit_grid(2, 8);
    EXPECT_NEAR(density_integrability(uniform(g, 2.0), 1.6, 1.4), 8.0, 1e-12);
    EXPECT_THROW(density_integrability(uniform(g, 2.0), 1.6, 0.0), invalid_input);
    const RegularizationParams reg{0.0, 0.5, 3.0};
    EXPECT_NEAR(artificial_pressure_integral(uniform(g, 2.0), reg), 4.0, 1e-12);
}

TEST(Diagnostics, NegativeDensityAborts) {
    const Grid g = unit_grid(2, 8);
    auto rho = uniform(g, 1.0);
    rho(0, 3) = -0.1;
    EXPECT_THROW(density_integrability(rho, 2.0, 0.5), solver_error);
}

TEST(Diagnostics, LargeTimeMetrics) {
    const Grid g = unit_grid(2, 16);
    const GalerkinBasis b(g, 3);
    const auto dir = from_function(g, [](const Vec3&) { return Vec3{0, 1, 0}; });
    const SteadyReference ref{1.2, dir.d, 0.0, 1.2};
    const FlowState s{uniform(g, 1.2), b.zero_coeffs(), dir, 5.0};
    const auto m = large_time_metrics(s, ref, b, 2.0);
    EXPECT_NEAR(m.rho_distance, 0.0, 1e-15);
    EXPECT_EQ(m.u_norm, 0.0);
    EXPECT_EQ(m.d_distance, 0.0);
    const FlowState heavy{uniform(g, 1.3), b.zero_coeffs(), dir, 5.0};
    EXPECT_THROW(large_time_metrics(heavy, ref, b, 2.0), invalid_input);
}
