#ifndef NLC_CONFIG_HPP
#define NLC_CONFIG_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nlc/continuity.hpp"
#include "nlc/grid.hpp"
#include "nlc/momentum.hpp"
#include "nlc/penalty.hpp"

namespace nlc {

class config_error : public invalid_input {
public:
    using invalid_input::invalid_input;
};

struct SimConfig {
    struct GridBlock {
        int dim = 2;
        std::array<int, 3> count{64, 64, 64};
        std::array<double, 3> extent{1.0, 1.0, 1.0};
    } grid;
    FluidParams fluid;
    RegularizationParams reg;
    struct PenaltyBlock {
        double sigma0 = 1.0;
        double c0 = 1.0;
    } penalty;
    struct GalerkinBlock {
        int modes_per_axis = 8;
        int picard_iters = 1;
    } galerkin;
    struct TimeBlock {
        double t_end = 1.0;
        double safety = 0.15;
        double dt_max = 1e-2;
        int log_every = 10;
    } time;
    struct InitialBlock {
        std::string profile = "rest";
        double rho_mean = 1.0;
        double bump_amplitude = 0.2;
        double bump_width = 0.15;
        std::array<double, 3> bump_center{0.5, 0.5, 0.5};
        double shear_amplitude = 0.5;
        double director_noise = 0.3;
        int director_modes = 2;
        std::uint64_t seed = 1;
        std::string director = "trace";  ///< trace | steady
        std::string trace = "constant";
        double trace_angle = 0.0;  ///< in-plane angle of the director at x = 0 (radians)
        double trace_twist = 0.0;  ///< rotation of the trace across the x extent (radians)
        double vacuum_radius = 0.0;
    } initial;
    struct DirectorBlock {
        double steady_tol = 1e-8;
        int max_iters = 5000;
    } director;
    struct OutputBlock {
        std::string directory = "out";
        int snapshot_every = 0;
    } output;
    struct ContinuationBlock {
        int levels = 4;
        double eps0 = 1e-2;
        double delta0 = 1e-2;
    } continuation;
    struct CheckBlock {
        bool enabled = true;
        double mass_tol = 1e-10;
        double max_principle_tol = 1e-6;
        double energy_tol = 1e-3;
        double galerkin_tol = 1e-9;
        double sigma = 0.0;  ///< integrability exponent gain; <= 0 selects 2 gamma/3 - 1
    } checks;

    Grid make_grid() const {
        return nlc::make_grid(grid.dim, std::span<const double>(grid.extent.data(), grid.dim),
                              std::span<const int>(grid.count.data(), grid.dim));
    }
    double integrability_sigma() const { return checks.sigma > 0.0 ? checks.sigma : 2.0 * fluid.gamma / 3.0 - 1.0; }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view v, const std::string& key) {
    T out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw config_error("invalid value '" + std::string(v) + "' for key '" + key + "'");
    return out;
}

inline bool parse_bool(std::string_view v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw config_error("invalid boolean '" + std::string(v) + "' for key '" + key + "'");
}

using Setter = std::function<void(SimConfig&, std::string_view, const std::string&)>;

inline std::map<std::string, Setter> config_keys() {
    std::map<std::string, Setter> k;
    auto dbl = [](auto member) {
        return Setter([member](SimConfig& c, std::string_view v, const std::string& key) {
            member(c) = parse_number<double>(v, key);
        });
    };
    auto integer = [](auto member) {
        return Setter([member](SimConfig& c, std::string_view v, const std::string& key) {
            member(c) = parse_number<int>(v, key);
        });
    };
    auto str = [](auto member) {
        return Setter([member](SimConfig& c, std::string_view v, const std::string&) { member(c) = std::string(v); });
    };
    k["grid.dim"] = integer([](SimConfig& c) -> int& { return c.grid.dim; });
    k["grid.nx"] = integer([](SimConfig& c) -> int& { return c.grid.count[0]; });
    k["grid.ny"] = integer([](SimConfig& c) -> int& { return c.grid.count[1]; });
    k["grid.nz"] = integer([](SimConfig& c) -> int& { return c.grid.count[2]; });
    k["grid.lx"] = dbl([](SimConfig& c) -> double& { return c.grid.extent[0]; });
    k["grid.ly"] = dbl([](SimConfig& c) -> double& { return c.grid.extent[1]; });
    k["grid.lz"] = dbl([](SimConfig& c) -> double& { return c.grid.extent[2]; });
    k["fluid.a"] = dbl([](SimConfig& c) -> double& { return c.fluid.a; });
    k["fluid.gamma"] = dbl([](SimConfig& c) -> double& { return c.fluid.gamma; });
    k["fluid.mu"] = dbl([](SimConfig& c) -> double& { return c.fluid.mu; });
    k["fluid.lambda"] = dbl([](SimConfig& c) -> double& { return c.fluid.lambda; });
    k["fluid.theta"] = dbl([](SimConfig& c) -> double& { return c.fluid.theta; });
    k["reg.eps"] = dbl([](SimConfig& c) -> double& { return c.reg.eps; });
    k["reg.delta"] = dbl([](SimConfig& c) -> double& { return c.reg.delta; });
    k["reg.beta"] = dbl([](SimConfig& c) -> double& { return c.reg.beta; });
    k["penalty.sigma0"] = dbl([](SimConfig& c) -> double& { return c.penalty.sigma0; });
    k["penalty.c0"] = dbl([](SimConfig& c) -> double& { return c.penalty.c0; });
    k["galerkin.modes_per_axis"] = integer([](SimConfig& c) -> int& { return c.galerkin.modes_per_axis; });
    k["galerkin.picard_iters"] = integer([](SimConfig& c) -> int& { return c.galerkin.picard_iters; });
    k["time.t_end"] = dbl([](SimConfig& c) -> double& { return c.time.t_end; });
    k["time.safety"] = dbl([](SimConfig& c) -> double& { return c.time.safety; });
    k["time.dt_max"] = dbl([](SimConfig& c) -> double& { return c.time.dt_max; });
    k["time.log_every"] = integer([](SimConfig& c) -> int& { return c.time.log_every; });
    k["initial.profile"] = str([](SimConfig& c) -> std::string& { return c.initial.profile; });
    k["initial.rho_mean"] = dbl([](SimConfig& c) -> double& { return c.initial.rho_mean; });
    k["initial.bump_amplitude"] = dbl([](SimConfig& c) -> double& { return c.initial.bump_amplitude; });
    k["initial.bump_width"] = dbl([](SimConfig& c) -> double& { return c.initial.bump_width; });
    k["initial.bump_x"] = dbl([](SimConfig& c) -> double& { return c.initial.bump_center[0]; });
    k["initial.bump_y"] = dbl([](SimConfig& c) -> double& { return c.initial.bump_center[1]; });
    k["initial.bump_z"] = dbl([](SimConfig& c) -> double& { return c.initial.bump_center[2]; });
    k["initial.shear_amplitude"] = dbl([](SimConfig& c) -> double& { return c.initial.shear_amplitude; });
    k["initial.director_noise"] = dbl([](SimConfig& c) -> double& { return c.initial.director_noise; });
    k["initial.director_modes"] = integer([](SimConfig& c) -> int& { return c.initial.director_modes; });
    k["initial.seed"] = Setter([](SimConfig& c, std::string_view v, const std::string& key) {
        c.initial.seed = parse_number<std::uint64_t>(v, key);
    });
    k["initial.director"] = str([](SimConfig& c) -> std::string& { return c.initial.director; });
    k["initial.trace"] = str([](SimConfig& c) -> std::string& { return c.initial.trace; });
    k["initial.trace_angle"] = dbl([](SimConfig& c) -> double& { return c.initial.trace_angle; });
    k["initial.trace_twist"] = dbl([](SimConfig& c) -> double& { return c.initial.trace_twist; });
    k["initial.vacuum_radius"] = dbl([](SimConfig& c) -> double& { return c.initial.vacuum_radius; });
    k["director.steady_tol"] = dbl([](SimConfig& c) -> double& { return c.director.steady_tol; });
    k["director.max_iters"] = integer([](SimConfig& c) -> int& { return c.director.max_iters; });
    k["output.directory"] = str([](SimConfig& c) -> std::string& { return c.output.directory; });
    k["output.snapshot_every"] = integer([](SimConfig& c) -> int& { return c.output.snapshot_every; });
    k["continuation.levels"] = integer([](SimConfig& c) -> int& { return c.continuation.levels; });
    k["continuation.eps0"] = dbl([](SimConfig& c) -> double& { return c.continuation.eps0; });
    k["continuation.delta0"] = dbl([](SimConfig& c) -> double& { return c.continuation.delta0; });
    k["checks.enabled"] = Setter([](SimConfig& c, std::string_view v, const std::string& key) {
        c.checks.enabled = parse_bool(v, key);
    });
    k["checks.mass_tol"] = dbl([](SimConfig& c) -> double& { return c.checks.mass_tol; });
    k["checks.max_principle_tol"] = dbl([](SimConfig& c) -> double& { return c.checks.max_principle_tol; });
    k["checks.energy_tol"] = dbl([](SimConfig& c) -> double& { return c.checks.energy_tol; });
    k["checks.galerkin_tol"] = dbl([](SimConfig& c) -> double& { return c.checks.galerkin_tol; });
    k["checks.sigma"] = dbl([](SimConfig& c) -> double& { return c.checks.sigma; });
    return k;
}

}  // namespace detail

/// Every recognised configuration key.
inline std::vector<std::string> config_key_list() {
    std::vector<std::string> out;
    for (const auto& [k, _] : detail::config_keys()) out.push_back(k);
    return out;
}

/// Check the parsed configuration against the hypotheses of the existence
/// theory. Hard violations throw config_error; soft ones come back as
/// warnings.
inline std::vector<std::string> validate_config(const SimConfig& c) {
    std::vector<std::string> warnings;
    try {
        GalerkinBasis::check_size(c.make_grid(), c.galerkin.modes_per_axis);
        c.fluid.validate();
        warnings = c.reg.validate(c.fluid.gamma);
        GinzburgLandauPenalty(c.penalty.sigma0, c.penalty.c0);
    } catch (const config_error&) {
        throw;
    } catch (const invalid_input& e) {
        throw config_error(e.what());
    }
    if (!(c.time.t_end >= 0.0)) throw config_error("time.t_end must be >= 0");
    if (!(c.time.safety > 0.0 && c.time.safety <= 1.0)) throw config_error("time.safety must lie in (0, 1]");
    if (!(c.time.dt_max > 0.0)) throw config_error("time.dt_max must be positive");
    if (c.time.log_every < 1) throw config_error("time.log_every must be >= 1");
    if (c.galerkin.picard_iters < 1) throw config_error("galerkin.picard_iters must be >= 1");
    if (c.output.snapshot_every < 0) throw config_error("output.snapshot_every must be >= 0");
    if (c.continuation.levels < 3) throw config_error("continuation.levels must be >= 3");
    if (!(c.director.steady_tol > 0.0)) throw config_error("director.steady_tol must be positive");
    if (!(c.initial.rho_mean >= 0.0)) throw config_error("initial.rho_mean must be >= 0");
    static const std::array<std::string_view, 4> profiles{"rest", "bump", "shear", "random-director"};
    if (std::find(profiles.begin(), profiles.end(), c.initial.profile) == profiles.end())
        throw config_error("unknown initial.profile '" + c.initial.profile +
                           "' (expected rest, bump, shear or random-director)");
    if (c.initial.trace != "constant" && c.initial.trace != "rotating")
        throw config_error("unknown initial.trace '" + c.initial.trace + "' (expected constant or rotating)");
    if (c.initial.director != "trace" && c.initial.director != "steady")
        throw config_error("unknown initial.director '" + c.initial.director + "' (expected trace or steady)");
    return warnings;
}

struct ParsedConfig {
    SimConfig config;
    std::vector<std::string> warnings;
};

/// Parse `key = value` lines; `#` starts a comment.
inline ParsedConfig parse_config(std::istream& in) {
    static const auto keys = detail::config_keys();
    ParsedConfig out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s(line);
        if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = detail::trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos)
            throw config_error("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key(detail::trim(s.substr(0, eq)));
        const std::string_view value = detail::trim(s.substr(eq + 1));
        auto it = keys.find(key);
        if (it == keys.end()) throw config_error("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (value.empty()) throw config_error("line " + std::to_string(lineno) + ": missing value for '" + key + "'");
        try {
            it->second(out.config, value, key);
        } catch (const config_error& e) {
            throw config_error("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    out.warnings = validate_config(out.config);
    return out;
}

inline ParsedConfig parse_config_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline ParsedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    return parse_config(in);
}

}  // namespace nlc

#endif  // NLC_CONFIG_HPP
