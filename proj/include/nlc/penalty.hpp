#ifndef NLC_PENALTY_HPP
#define NLC_PENALTY_HPP

#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <numbers>
#include <span>

#include "nlc/grid.hpp"

namespace nlc {

/// Bulk elastic energy F(d) with force f(d) = grad_d F(d) and the radius C0
/// beyond which d . f(d) >= 0 is expected to hold.
template <class P>
concept Penalty = requires(const P& p, const Vec3& d) {
    { p.value(d) } -> std::convertible_to<double>;
    { p.force(d) } -> std::convertible_to<Vec3>;
    { p.c0() } -> std::convertible_to<double>;
};

/// F(d) = (|d|^2 - 1)^2 / (4 sigma0^2),  f(d) = grad F = (|d|^2 - 1) d / sigma0^2.
class GinzburgLandauPenalty {
public:
    explicit GinzburgLandauPenalty(double sigma0 = 1.0, double c0 = 1.0) : sigma0_(sigma0), c0_(c0) {
        if (!(sigma0 > 0.0)) throw invalid_input("penalty.sigma0 must be positive");
        if (!(c0 > 0.0)) throw invalid_input("penalty.c0 must be positive");
    }

    double value(const Vec3& d) const {
        const double s = norm2(d) - 1.0;
        return s * s / (4.0 * sigma0_ * sigma0_);
    }
    Vec3 force(const Vec3& d) const {
        const double k = (norm2(d) - 1.0) / (sigma0_ * sigma0_);
        return {k * d[0], k * d[1], k * d[2]};
    }
    double c0() const { return c0_; }
    double sigma0() const { return sigma0_; }

private:
    double sigma0_;
    double c0_;
};

/// F == 0. Turns the director equation into the vector heat equation.
struct ZeroPenalty {
    double value(const Vec3&) const { return 0.0; }
    Vec3 force(const Vec3&) const { return {0.0, 0.0, 0.0}; }
    double c0() const { return 1.0; }
};

/// Penalty assembled from arbitrary callables (used to probe the structural
/// condition with non-standard forces).
struct FunctionPenalty {
    std::function<double(const Vec3&)> F;
    std::function<Vec3(const Vec3&)> f;
    double threshold = 1.0;

    double value(const Vec3& d) const { return F(d); }
    Vec3 force(const Vec3& d) const { return f(d); }
    double c0() const { return threshold; }
};

struct StructuralReport {
    bool pass = true;
    double min_value = std::numeric_limits<double>::infinity();
    double radius_at_min = 0.0;
};

/// Evaluate d . f(d) on `sample_count` quasi-uniform directions (Fibonacci
/// sphere) at every radius and report the smallest value.
template <Penalty P>
StructuralReport check_structural_condition(const P& p, std::span<const double> sample_radii, int sample_count) {
    if (sample_count < 1) throw invalid_input("structural check needs at least one direction");
    StructuralReport rep;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (double r : sample_radii) {
        if (r < p.c0()) throw invalid_input("structural check radii must be >= C0");
        for (int k = 0; k < sample_count; ++k) {
            const double z = 1.0 - 2.0 * (k + 0.5) / sample_count;
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * k;
            const Vec3 d{r * rho * std::cos(phi), r * rho * std::sin(phi), r * z};
            const double v = dot(d, p.force(d));
            // rounding of |d| on the sphere r = 1 must not flip the sign
            if (v < -1e-12 * std::max(1.0, r * r)) rep.pass = false;
            if (v < rep.min_value) {
                rep.min_value = v;
                rep.radius_at_min = r;
            }
        }
    }
    return rep;
}

}  // namespace nlc

#endif  // NLC_PENALTY_HPP
