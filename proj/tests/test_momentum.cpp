#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nlc/momentum.hpp"

using namespace nlc;
using std::numbers::pi;

namespace {

DirectorState constant_state(const Grid& g, Vec3 e) {
    DirectorField d(g);
    for (std::size_t i = 0; i < g.cells(); ++i) set_director(d, i, e);
    return {d, std::make_shared<const BoundaryTrace>(BoundaryTrace::from_function(g, 3, [e](const Vec3&) { return e; }))};
}

ScalarField uniform(const Grid& g, double v) {
    ScalarField r(g);
    for (double& x : r.data()) x = v;
    return r;
}

double gram_norm(const VelocityCoeffs& c, const GalerkinBasis& b, const ScalarField& rho) {
    const auto M = b.weighted_gram(rho.component(0));
    double acc = 0.0;
    for (int comp = 0; comp < b.grid().dim; ++comp) {
        Eigen::Map<const Eigen::VectorXd> x(c.c.data() + comp * b.block_size(), b.block_size());
        acc += x.dot(M * x);
    }
    return std::sqrt(acc);
}

}  // namespace

TEST(FluidParams, Validation) {
    FluidParams p;
    EXPECT_NO_THROW(p.validate());
    p.gamma = 1.4;
    try {
        p.validate();
        FAIL();
    } catch (const invalid_input& e) {
        EXPECT_STREQ(e.what(), "gamma must exceed 3/2");
    }
    FluidParams q;
    q.mu = 0.0;
    EXPECT_THROW(q.validate(), invalid_input);
}

TEST(Momentum, RestStateStaysAtRest) {
    const Grid g = unit_grid(2, 32);
    const GalerkinBasis b(g, 6);
    const auto rho = uniform(g, 1.3);
    const auto d = constant_state(g, {0, 0, 1});
    const FluidParams fp;
    const RegularizationParams reg{0.01, 0.01, 13.0};
    const auto c = momentum_step(rho, rho, b.zero_coeffs(), d, fp, reg, GinzburgLandauPenalty(), b, 0.01);
    for (double v : c.c) EXPECT_NEAR(v, 0.0, 1e-14);
}

TEST(Momentum, FlowLeavesHighPressure) {
    const Grid g = unit_grid(2, 48);
    const GalerkinBasis b(g, 8);
    const auto rho = sample<FieldKind::scalar>(g, [](const Vec3& x) {
        const double r2 = (x[0] - 0.45) * (x[0] - 0.45) + (x[1] - 0.55) * (x[1] - 0.55);
        return 1.0 + 0.3 * std::exp(-r2 / (2 * 0.1 * 0.1));
    });
    const auto d = constant_state(g, {1, 0, 0});
    const auto c = momentum_step(rho, rho, b.zero_coeffs(), d, FluidParams{}, RegularizationParams{}, ZeroPenalty(), b,
                                 1e-3);
    const auto u = b.realize(c);
    const auto grad = gradient(rho, BoundarySpec::neumann());
    double gmax = 0.0;
    for (std::size_t i = 0; i < g.cells(); ++i) gmax = std::max(gmax, std::hypot(grad(0, i), grad(1, i)));
    int checked = 0;
    for (std::size_t i = 0; i < g.cells(); ++i) {
        if (std::hypot(grad(0, i), grad(1, i)) < 0.5 * gmax) continue;
        EXPECT_LT(u(0, i) * grad(0, i) + u(1, i) * grad(1, i), 0.0);
        ++checked;
    }
    EXPECT_GT(checked, 20);
}

TEST(Momentum, ViscousDecay) {
    const Grid g = unit_grid(2, 32);
    const GalerkinBasis b(g, 4);
    const auto rho = uniform(g, 1.0);
    VelocityCoeffs c = b.zero_coeffs();
    for (std::size_t i = 0; i < c.c.size(); ++i) c.c[i] = 0.1 * std::cos(1.0 + i);
    FluidParams fp;
    fp.mu = 50.0;
    const auto d = constant_state(g, {1, 0, 0});
    const auto next = momentum_step(rho, rho, c, d, fp, RegularizationParams{}, ZeroPenalty(), b, 1e-3);
    EXPECT_LT(gram_norm(next, b, rho), gram_norm(c, b, rho));
}

TEST(Momentum, SingleModeDecayFactor) {
    // tiny amplitude: convection is negligible and the mode decays by 1/(1 + dt mu lambda_K)
    const Grid g = unit_grid(2, 32);
    const GalerkinBasis b(g, 3);
    const auto rho = uniform(g, 1.0);
    VelocityCoeffs c = b.zero_coeffs();
    const int K = 1 + 3 * 2;  // (k0, k1) = (2, 3)
    c.c[K] = 1e-9;
    const double dt = 1e-2;
    const auto next = momentum_step(rho, rho, c, constant_state(g, {1, 0, 0}), FluidParams{}, RegularizationParams{},
                                    ZeroPenalty(), b, dt);
    const double lam = pi * pi * 13.0;
    EXPECT_NEAR(next.c[K] / c.c[K], 1.0 / (1.0 + dt * lam), 1e-8);
}

TEST(Momentum, ResidualOfSolvedStepIsSmall) {
    const Grid g = unit_grid(2, 32);
    const GalerkinBasis b(g, 5);
    const auto rho0 = sample<FieldKind::scalar>(g, [](const Vec3& x) { return 1.0 + 0.2 * std::cos(pi * x[0]); });
    const auto rho1 = sample<FieldKind::scalar>(g, [](const Vec3& x) { return 1.0 + 0.19 * std::cos(pi * x[0]) + 0.01 * std::cos(pi * x[1]); });
    VelocityCoeffs c = b.zero_coeffs();
    for (std::size_t i = 0; i < c.c.size(); ++i) c.c[i] = 0.05 * std::sin(3.0 * i);
    auto d = constant_state(g, {1, 0, 0});
    for (std::size_t i = 0; i < g.cells(); ++i) {
        const Vec3 x = g.position(i);
        set_director(d.d, i, {std::cos(0.3 * std::sin(pi * x[0]) * std::sin(pi * x[1])), std::sin(0.3 * std::sin(pi * x[0]) * std::sin(pi * x[1])), 0.0});
    }
    const FluidParams fp;
    const RegularizationParams reg{0.02, 0.01, 13.0};
    const GinzburgLandauPenalty pen;
    const auto next = momentum_step(rho0, rho1, c, d, fp, reg, pen, b, 5e-3);
    EXPECT_LT(momentum_residual(rho0, rho1, c, next, d, fp, reg, pen, b, 5e-3), 1e-12);
    // a perturbed solution is detected
    auto wrong = next;
    wrong.c[3] += 1e-6;
    EXPECT_GT(momentum_residual(rho0, rho1, c, wrong, d, fp, reg, pen, b, 5e-3), 1e-9);
}

TEST(Momentum, PressureIncludesArtificialTerm) {
    FluidParams fp;
    fp.a = 2.0;
    EXPECT_DOUBLE_EQ(pressure(1.5, fp, RegularizationParams{0.0, 0.0, 13.0}), 2.0 * 2.25);
    EXPECT_DOUBLE_EQ(pressure(2.0, fp, RegularizationParams{0.0, 0.1, 5.0}), 2.0 * 4.0 + 0.1 * 32.0);
}
