#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "nlc/linear_solvers.hpp"

using namespace nlc;

TEST(ConjugateGradient, MatchesDenseCholesky) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> N;
    const int n = 40;
    Eigen::MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B(i, j) = N(rng);
    const Eigen::MatrixXd A = B * B.transpose() + n * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b[i] = N(rng);
    const Eigen::VectorXd ref = A.llt().solve(b);

    std::vector<double> bb(b.data(), b.data() + n), x(n, 0.0);
    const auto res = conjugate_gradient(
        [&](std::span<const double> v, std::span<double> y) {
            Eigen::Map<Eigen::VectorXd>(y.data(), n) = A * Eigen::Map<const Eigen::VectorXd>(v.data(), n);
        },
        bb, x, 1e-13, 1000);
    EXPECT_LE(res.relative_residual, 1e-13);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(x[i], ref[i], 1e-10);
}

TEST(ConjugateGradient, ZeroRightHandSide) {
    std::vector<double> b(5, 0.0), x{1, 2, 3, 4, 5};
    conjugate_gradient([](std::span<const double> v, std::span<double> y) { std::copy(v.begin(), v.end(), y.begin()); },
                       b, x, 1e-12, 10);
    for (double v : x) EXPECT_EQ(v, 0.0);
}

TEST(ConjugateGradient, TinyRightHandSideStillConverges) {
    const Grid g = unit_grid(2, 16);
    std::vector<double> b(g.cells()), x(g.cells(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = 1e-170 * std::sin(0.1 * i);
    auto apply = [&](std::span<const double> v, std::span<double> y) {
        apply_shifted_laplacian(v, y, g, 0.01, BoundaryKind::dirichlet);
    };
    const auto r = conjugate_gradient(apply, b, x, 1e-10, 1000);
    EXPECT_LE(r.relative_residual, 1e-10);
    std::vector<double> y(b.size());
    apply(x, y);
    for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(y[i] / 1e-170, b[i] / 1e-170, 1e-8);
}

TEST(ConjugateGradient, NonConvergenceThrows) {
    const Grid g = unit_grid(2, 32);
    std::vector<double> b(g.cells(), 1.0), x(g.cells(), 0.0);
    EXPECT_THROW(conjugate_gradient(
                     [&](std::span<const double> v, std::span<double> y) {
                         apply_shifted_laplacian(v, y, g, 10.0, BoundaryKind::dirichlet);
                     },
                     b, x, 1e-14, 3),
                 solver_error);
}

TEST(ShiftedLaplacian, SymmetricForBothKinds) {
    const Grid g = make_grid(2, {1.0, 2.0}, {8, 12});
    std::mt19937_64 rng(1);
    std::normal_distribution<double> N;
    std::vector<double> a(g.cells()), b(g.cells()), Aa(g.cells()), Ab(g.cells());
    for (auto& v : a) v = N(rng);
    for (auto& v : b) v = N(rng);
    for (auto kind : {BoundaryKind::neumann, BoundaryKind::dirichlet}) {
        apply_shifted_laplacian(a, Aa, g, 0.3, kind);
        apply_shifted_laplacian(b, Ab, g, 0.3, kind);
        double ab = 0, ba = 0;
        for (std::size_t i = 0; i < a.size(); ++i) ab += a[i] * Ab[i], ba += b[i] * Aa[i];
        EXPECT_NEAR(ab, ba, 1e-12 * std::abs(ab));
    }
}

TEST(ShiftedLaplacian, NeumannColumnsSumToOne) {
    const Grid g = unit_grid(2, 8);
    std::vector<double> e(g.cells(), 0.0), y(g.cells());
    for (std::size_t j = 0; j < g.cells(); j += 5) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        apply_shifted_laplacian(e, y, g, 0.7, BoundaryKind::neumann);
        double s = 0.0;
        for (double v : y) s += v;
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
}
