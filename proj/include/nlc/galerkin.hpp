#ifndef NLC_GALERKIN_HPP
#define NLC_GALERKIN_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "nlc/grid.hpp"

namespace nlc {

/// Dense row-major table used for sum-factorised transforms.
struct Table {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Table() = default;
    Table(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}
    double& operator()(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }

    Table transposed() const {
        Table t(cols, rows);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) t(c, r) = (*this)(r, c);
        return t;
    }
};

/// Contract one axis of a 3-index tensor (axis 0 fastest) with `T`
/// (rows x shape[axis]); on return shape[axis] == T.rows.
inline std::vector<double> contract_axis(const std::vector<double>& in, std::array<int, 3>& shape, int axis,
                                         const Table& T) {
    std::size_t lo = 1, hi = 1;
    for (int a = 0; a < axis; ++a) lo *= static_cast<std::size_t>(shape[a]);
    for (int a = axis + 1; a < 3; ++a) hi *= static_cast<std::size_t>(shape[a]);
    const int n = shape[axis];
    const int R = T.rows;
    std::vector<double> out(lo * R * hi, 0.0);
    for (std::size_t h = 0; h < hi; ++h) {
        for (int r = 0; r < R; ++r) {
            double* o = out.data() + lo * (r + static_cast<std::size_t>(R) * h);
            for (int k = 0; k < n; ++k) {
                const double w = T(r, k);
                if (w == 0.0) continue;
                const double* src = in.data() + lo * (k + static_cast<std::size_t>(n) * h);
                for (std::size_t l = 0; l < lo; ++l) o[l] += w * src[l];
            }
        }
    }
    shape[axis] = R;
    return out;
}

/// Galerkin coefficients, component-major: c[comp * block + K].
struct VelocityCoeffs {
    std::vector<double> c;

    friend bool operator==(const VelocityCoeffs&, const VelocityCoeffs&) = default;
};

/// Tensor sine modes sin(k_0 pi x/L_0) ... sin(k_{dim-1} pi x/L_{dim-1}),
/// k_a = 1..m, placed in each velocity component. Every mode vanishes on the
/// walls (sampled at cell centres its ghost value is exactly antisymmetric).
///
/// Mode index: i = comp * m^dim + K with K = (k_0-1) + m (k_1-1) + m^2 (k_2-1).
/// Gram and stiffness matrices are block diagonal with one identical block
/// per component, so only the block is stored.
class GalerkinBasis {
public:
    static constexpr int max_modes = 4096;

    /// Throws invalid_input unless `modes_per_axis` fits on `grid`.
    static void check_size(const Grid& grid, int modes_per_axis) {
        if (modes_per_axis < 1) throw invalid_input("galerkin.modes_per_axis must be >= 1");
        long block = 1;
        for (int a = 0; a < grid.dim; ++a) {
            block *= modes_per_axis;
            if (modes_per_axis >= grid.count[a])
                throw invalid_input("galerkin.modes_per_axis must be below the cell count");
        }
        if (block * grid.dim > max_modes)
            throw invalid_input("Galerkin basis too large: " + std::to_string(block * grid.dim) + " modes (limit " +
                                std::to_string(max_modes) + ")");
    }

    GalerkinBasis(const Grid& grid, int modes_per_axis) : grid_(grid), m_(modes_per_axis) {
        check_size(grid, m_);
        block_ = 1;
        for (int a = 0; a < grid.dim; ++a) block_ *= m_;
        for (int a = 0; a < 3; ++a) {
            const int N = grid.count[a];
            if (a >= grid.dim) {
                // dummy axis: a single "mode" equal to one
                sin_[a] = Table(1, N);
                dsin_[a] = Table(1, N);
                sin_[a](0, 0) = 1.0;
            } else {
                sin_[a] = Table(m_, N);
                dsin_[a] = Table(m_, N);
                for (int k = 0; k < m_; ++k) {
                    const double w = (k + 1) * std::numbers::pi / grid.extent[a];
                    for (int i = 0; i < N; ++i) {
                        const double x = grid.center(a, i);
                        sin_[a](k, i) = std::sin(w * x);
                        dsin_[a](k, i) = w * std::cos(w * x);
                    }
                }
            }
            sinT_[a] = sin_[a].transposed();
            dsinT_[a] = dsin_[a].transposed();
        }
        std::vector<double> ones(grid.cells(), 1.0);
        gram_ = weighted_gram(ones);
        stiffness_ = Eigen::MatrixXd::Zero(block_, block_);
        for (int a = 0; a < grid.dim; ++a) stiffness_ += pair_quadrature(ones, a);
    }

    const Grid& grid() const { return grid_; }
    int modes_per_axis() const { return m_; }
    int block_size() const { return block_; }
    int size() const { return block_ * grid_.dim; }

    /// Per-component block of G_ij = int eta_i . eta_j.
    const Eigen::MatrixXd& gram_block() const { return gram_; }
    /// Per-component block of K_ij = int grad eta_i : grad eta_j.
    const Eigen::MatrixXd& stiffness_block() const { return stiffness_; }

    double gram(int i, int j) const { return i / block_ == j / block_ ? gram_(i % block_, j % block_) : 0.0; }
    double stiffness(int i, int j) const {
        return i / block_ == j / block_ ? stiffness_(i % block_, j % block_) : 0.0;
    }

    /// Wave numbers (k_0, k_1, k_2) of block index K (k_a = 0 on dummy axes).
    std::array<int, 3> wave_numbers(int K) const {
        std::array<int, 3> k{0, 0, 0};
        for (int a = 0; a < grid_.dim; ++a) {
            k[a] = K % m_ + 1;
            K /= m_;
        }
        return k;
    }

    /// Block of int w eta_i . eta_j (density-weighted Gram).
    Eigen::MatrixXd weighted_gram(std::span<const double> w) const { return pair_quadrature(w, -1); }

    /// int g * d_{deriv_axis} S_K for every block index K (deriv_axis < 0:
    /// no derivative).
    Eigen::VectorXd project_scalar(std::span<const double> g, int deriv_axis = -1) const {
        std::vector<double> t(g.begin(), g.end());
        std::array<int, 3> shape = grid_.count;
        for (int a = 0; a < 3; ++a) t = contract_axis(t, shape, a, a == deriv_axis ? dsin_[a] : sin_[a]);
        Eigen::VectorXd out(block_);
        const double vol = grid_.cell_volume();
        for (int K = 0; K < block_; ++K) out[K] = vol * t[K];
        return out;
    }

    /// Cell values of sum_K coef[K] d_{deriv_axis} S_K.
    std::vector<double> expand_scalar(const double* coef, int deriv_axis = -1) const {
        std::vector<double> t(coef, coef + block_);
        std::array<int, 3> shape{1, 1, 1};
        for (int a = 0; a < grid_.dim; ++a) shape[a] = m_;
        for (int a = 0; a < 3; ++a) t = contract_axis(t, shape, a, a == deriv_axis ? dsinT_[a] : sinT_[a]);
        return t;
    }

    VectorField realize(const VelocityCoeffs& c) const {
        VectorField u(grid_);
        for (int comp = 0; comp < grid_.dim; ++comp) {
            auto v = expand_scalar(c.c.data() + comp * block_);
            std::copy(v.begin(), v.end(), u.component(comp).begin());
        }
        return u;
    }

    /// grad[comp][a] = d u_comp / d x_a at cell centres (exact for the modes).
    std::vector<std::vector<std::vector<double>>> realize_gradient(const VelocityCoeffs& c) const {
        std::vector<std::vector<std::vector<double>>> grad(grid_.dim);
        for (int comp = 0; comp < grid_.dim; ++comp)
            for (int a = 0; a < grid_.dim; ++a) grad[comp].push_back(expand_scalar(c.c.data() + comp * block_, a));
        return grad;
    }

    VelocityCoeffs zero_coeffs() const { return {std::vector<double>(size(), 0.0)}; }

private:
    /// Block of int w * (d_a S_K)(d_a S_K') (deriv_axis = a) or of
    /// int w * S_K S_K' (deriv_axis < 0), by sum factorisation.
    Eigen::MatrixXd pair_quadrature(std::span<const double> w, int deriv_axis) const {
        std::vector<double> t(w.begin(), w.end());
        std::array<int, 3> shape = grid_.count;
        for (int a = 0; a < 3; ++a) {
            const Table& base = a == deriv_axis ? dsin_[a] : sin_[a];
            const int r = base.rows;
            Table pair(r * r, base.cols);
            for (int k = 0; k < r; ++k)
                for (int kp = 0; kp < r; ++kp)
                    for (int i = 0; i < base.cols; ++i) pair(k + r * kp, i) = base(k, i) * base(kp, i);
            t = contract_axis(t, shape, a, pair);
        }
        const double vol = grid_.cell_volume();
        Eigen::MatrixXd B(block_, block_);
        const int m = m_;
        for (int K = 0; K < block_; ++K) {
            auto k = wave_numbers(K);
            for (int Kp = 0; Kp < block_; ++Kp) {
                auto kp = wave_numbers(Kp);
                std::size_t idx = 0, mul = 1;
                for (int a = 0; a < grid_.dim; ++a) {
                    idx += mul * static_cast<std::size_t>((k[a] - 1) + m * (kp[a] - 1));
                    mul *= static_cast<std::size_t>(m) * m;
                }
                B(K, Kp) = vol * t[idx];
            }
        }
        return B;
    }

    Grid grid_;
    int m_;
    int block_ = 1;
    std::array<Table, 3> sin_, dsin_, sinT_, dsinT_;
    Eigen::MatrixXd gram_;
    Eigen::MatrixXd stiffness_;
};

inline GalerkinBasis build_basis(const Grid& grid, int modes_per_axis) { return GalerkinBasis(grid, modes_per_axis); }

/// L2 projection onto the span of the basis: solve G c = (int v . eta_i).
inline VelocityCoeffs project(const VectorField& v, const GalerkinBasis& basis) {
    if (!(v.grid() == basis.grid())) throw invalid_input("project: field and basis live on different grids");
    Eigen::LLT<Eigen::MatrixXd> llt(basis.gram_block());
    if (llt.info() != Eigen::Success) throw solver_error("Gram matrix is not positive definite");
    VelocityCoeffs c = basis.zero_coeffs();
    const int B = basis.block_size();
    for (int comp = 0; comp < basis.grid().dim; ++comp) {
        Eigen::VectorXd x = llt.solve(basis.project_scalar(v.component(comp)));
        for (int K = 0; K < B; ++K) c.c[comp * B + K] = x[K];
    }
    return c;
}

}  // namespace nlc

#endif  // NLC_GALERKIN_HPP
