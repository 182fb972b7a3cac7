#ifndef NLC_GRID_HPP
#define NLC_GRID_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlc {

/// Raised when a precondition on user-supplied data is violated.
class invalid_input : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure cannot produce a valid result
/// (non-convergence, NaN, CFL violation).
class solver_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm2(const Vec3& a) { return dot(a, a); }

/// Uniform cell-centred grid on the box [0, L_0] x ... x [0, L_{dim-1}].
///
/// Cells are stored with axis 0 varying fastest:
/// `index = i0 + n0 * (i1 + n1 * i2)`. For dim == 2 the third axis is a
/// single dummy layer so loops can be written once for both dimensions.
struct Grid {
    int dim = 2;
    std::array<double, 3> extent{1.0, 1.0, 1.0};
    std::array<int, 3> count{1, 1, 1};
    std::array<double, 3> spacing{1.0, 1.0, 1.0};

    std::size_t cells() const {
        return static_cast<std::size_t>(count[0]) * count[1] * count[2];
    }
    std::size_t stride(int axis) const {
        std::size_t s = 1;
        for (int a = 0; a < axis; ++a) s *= static_cast<std::size_t>(count[a]);
        return s;
    }
    double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= spacing[a];
        return v;
    }
    double volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= extent[a];
        return v;
    }
    double min_spacing() const {
        double h = spacing[0];
        for (int a = 1; a < dim; ++a) h = std::min(h, spacing[a]);
        return h;
    }
    double center(int axis, int i) const { return (i + 0.5) * spacing[axis]; }

    std::array<int, 3> unflatten(std::size_t idx) const {
        std::array<int, 3> ijk{};
        ijk[0] = static_cast<int>(idx % count[0]);
        idx /= count[0];
        ijk[1] = static_cast<int>(idx % count[1]);
        ijk[2] = static_cast<int>(idx / count[1]);
        return ijk;
    }
    std::size_t flatten(const std::array<int, 3>& ijk) const {
        return static_cast<std::size_t>(ijk[0]) +
               static_cast<std::size_t>(count[0]) * (ijk[1] + static_cast<std::size_t>(count[1]) * ijk[2]);
    }
    std::size_t flatten(int i, int j, int k) const { return flatten(std::array<int, 3>{i, j, k}); }
    std::array<double, 3> position(std::size_t idx) const {
        auto ijk = unflatten(idx);
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (int a = 0; a < dim; ++a) x[a] = center(a, ijk[a]);
        return x;
    }

    friend bool operator==(const Grid&, const Grid&) = default;
};

inline Grid make_grid(int dim, std::span<const double> extents, std::span<const int> counts) {
    if (dim != 2 && dim != 3) throw invalid_input("grid dimension must be 2 or 3");
    if (static_cast<int>(extents.size()) < dim || static_cast<int>(counts.size()) < dim)
        throw invalid_input("grid needs one extent and one count per axis");
    Grid g;
    g.dim = dim;
    for (int a = 0; a < dim; ++a) {
        if (!(extents[a] > 0.0)) throw invalid_input("grid extents must be positive");
        if (counts[a] < 8) throw invalid_input("grid needs at least 8 cells per axis");
        g.extent[a] = extents[a];
        g.count[a] = counts[a];
        g.spacing[a] = extents[a] / counts[a];
    }
    return g;
}

inline Grid make_grid(int dim, std::initializer_list<double> extents, std::initializer_list<int> counts) {
    return make_grid(dim, std::span<const double>(extents.begin(), extents.size()),
                     std::span<const int>(counts.begin(), counts.size()));
}

/// Unit box with n cells per axis.
inline Grid unit_grid(int dim, int n) {
    std::array<double, 3> ext{1.0, 1.0, 1.0};
    std::array<int, 3> cnt{n, n, n};
    return make_grid(dim, std::span<const double>(ext.data(), dim), std::span<const int>(cnt.data(), dim));
}

enum class FieldKind { scalar, vector, director };

constexpr int components_of(FieldKind kind, int dim) {
    switch (kind) {
    case FieldKind::scalar: return 1;
    case FieldKind::vector: return dim;
    case FieldKind::director: return 3;
    }
    return 1;
}

/// Cell-centred field. Components are stored planar (component-major) so
/// each component is a contiguous span of `grid.cells()` values.
template <FieldKind Kind>
class Field {
public:
    static constexpr FieldKind kind = Kind;

    Field() = default;
    explicit Field(const Grid& grid, double fill = 0.0)
        : grid_(grid), ncomp_(components_of(Kind, grid.dim)),
          data_(static_cast<std::size_t>(ncomp_) * grid.cells(), fill) {}

    const Grid& grid() const { return grid_; }
    int components() const { return ncomp_; }
    std::size_t cells() const { return grid_.cells(); }

    std::span<double> component(int c) { return {data_.data() + c * cells(), cells()}; }
    std::span<const double> component(int c) const { return {data_.data() + c * cells(), cells()}; }

    double& operator()(int c, std::size_t cell) { return data_[c * cells() + cell]; }
    double operator()(int c, std::size_t cell) const { return data_[c * cells() + cell]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    friend bool operator==(const Field&, const Field&) = default;

private:
    Grid grid_{};
    int ncomp_ = 0;
    std::vector<double> data_;
};

using ScalarField = Field<FieldKind::scalar>;
using VectorField = Field<FieldKind::vector>;
using DirectorField = Field<FieldKind::director>;

inline Vec3 director_at(const DirectorField& d, std::size_t cell) {
    return {d(0, cell), d(1, cell), d(2, cell)};
}
inline void set_director(DirectorField& d, std::size_t cell, const Vec3& v) {
    d(0, cell) = v[0];
    d(1, cell) = v[1];
    d(2, cell) = v[2];
}

/// Fill a field from a callable `fn(x) -> value` (scalar) or `fn(x) -> array` (multi-component).
template <FieldKind Kind, class Fn>
Field<Kind> sample(const Grid& grid, Fn&& fn) {
    Field<Kind> f(grid);
    for (std::size_t idx = 0; idx < grid.cells(); ++idx) {
        auto x = grid.position(idx);
        if constexpr (Kind == FieldKind::scalar) {
            f(0, idx) = fn(x);
        } else {
            auto v = fn(x);
            for (int c = 0; c < f.components(); ++c) f(c, idx) = v[c];
        }
    }
    return f;
}

/// Boundary values prescribed on the wall faces of the box.
///
/// Wall `w = 2 * axis + side` (side 0 at x_axis = 0, side 1 at x_axis = L).
/// Faces on a wall are indexed by the flattened cell index of the adjacent
/// boundary cell with the wall axis removed.
class BoundaryTrace {
public:
    BoundaryTrace() = default;
    BoundaryTrace(const Grid& grid, int components) : grid_(grid), ncomp_(components) {
        for (int a = 0; a < grid.dim; ++a) {
            std::size_t faces = grid.cells() / grid.count[a];
            for (int s = 0; s < 2; ++s) walls_[2 * a + s].assign(faces * ncomp_, 0.0);
        }
    }

    /// Trace of a function evaluated at the wall face centres.
    template <class Fn>
    static BoundaryTrace from_function(const Grid& grid, int components, Fn&& fn) {
        BoundaryTrace t(grid, components);
        for (std::size_t idx = 0; idx < grid.cells(); ++idx) {
            auto ijk = grid.unflatten(idx);
            for (int a = 0; a < grid.dim; ++a) {
                for (int s = 0; s < 2; ++s) {
                    if (ijk[a] != (s == 0 ? 0 : grid.count[a] - 1)) continue;
                    auto x = grid.position(idx);
                    x[a] = s == 0 ? 0.0 : grid.extent[a];
                    auto v = fn(x);
                    for (int c = 0; c < components; ++c) t.at(a, s, idx, c) = v[c];
                }
            }
        }
        return t;
    }

    const Grid& grid() const { return grid_; }
    int components() const { return ncomp_; }

    std::size_t face_index(int axis, std::size_t cell) const {
        auto ijk = grid_.unflatten(cell);
        std::size_t f = 0, mul = 1;
        for (int b = 0; b < 3; ++b) {
            if (b == axis) continue;
            f += mul * static_cast<std::size_t>(ijk[b]);
            mul *= static_cast<std::size_t>(grid_.count[b]);
        }
        return f;
    }
    double& at(int axis, int side, std::size_t cell, int comp) {
        return walls_[2 * axis + side][face_index(axis, cell) * ncomp_ + comp];
    }
    double at(int axis, int side, std::size_t cell, int comp) const {
        return walls_[2 * axis + side][face_index(axis, cell) * ncomp_ + comp];
    }

    double max_norm() const {
        double m = 0.0;
        for (const auto& w : walls_) {
            for (std::size_t f = 0; f + ncomp_ <= w.size(); f += ncomp_) {
                double s = 0.0;
                for (int c = 0; c < ncomp_; ++c) s += w[f + c] * w[f + c];
                m = std::max(m, std::sqrt(s));
            }
        }
        return m;
    }

    friend bool operator==(const BoundaryTrace&, const BoundaryTrace&) = default;

private:
    Grid grid_{};
    int ncomp_ = 0;
    std::array<std::vector<double>, 6> walls_;
};

enum class BoundaryKind {
    /// Zero normal derivative; ghost cell mirrors the boundary cell.
    neumann,
    /// Prescribed wall value; ghost cell is the linear extrapolation
    /// `2 * trace - boundary_cell`. A missing trace means homogeneous data.
    dirichlet,
    /// No boundary data; one-sided stencils built from interior cells only.
    extrapolate,
};

struct BoundarySpec {
    BoundaryKind kind = BoundaryKind::extrapolate;
    std::shared_ptr<const BoundaryTrace> trace;

    static BoundarySpec neumann() { return {BoundaryKind::neumann, nullptr}; }
    static BoundarySpec homogeneous_dirichlet() { return {BoundaryKind::dirichlet, nullptr}; }
    static BoundarySpec dirichlet(BoundaryTrace t) {
        return {BoundaryKind::dirichlet, std::make_shared<const BoundaryTrace>(std::move(t))};
    }
    static BoundarySpec dirichlet(std::shared_ptr<const BoundaryTrace> t) { return {BoundaryKind::dirichlet, std::move(t)}; }
    static BoundarySpec extrapolate() { return {BoundaryKind::extrapolate, nullptr}; }

    double trace_value(int axis, int side, std::size_t cell, int comp) const {
        return trace ? trace->at(axis, side, cell, comp) : 0.0;
    }
};

}  // namespace nlc

#endif  // NLC_GRID_HPP
