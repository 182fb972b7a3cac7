#ifndef NLC_SIMULATION_HPP
#define NLC_SIMULATION_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nlc/config.hpp"
#include "nlc/continuity.hpp"
#include "nlc/diagnostics.hpp"
#include "nlc/director.hpp"
#include "nlc/galerkin.hpp"
#include "nlc/initial_data.hpp"
#include "nlc/io.hpp"
#include "nlc/momentum.hpp"
#include "nlc/penalty.hpp"

namespace nlc {

/// Solver failure inside the time loop, tagged with the failing step.
class run_aborted : public solver_error {
public:
    run_aborted(int step, const std::string& what)
        : solver_error("step " + std::to_string(step) + ": " + what), step(step) {}
    int step;
};

/// Quantities seen by a per-step observer.
struct StepInfo {
    int step = 0;
    double dt = 0.0;
    const FlowState* state = nullptr;
    const EnergyReport* energy = nullptr;
    double balance_residual = 0.0;
    double galerkin_residual = 0.0;
};

struct RunOptions {
    bool write_files = true;
    std::function<void(const StepInfo&)> observer;
};

struct RunSummary {
    int steps = 0;
    double t_final = 0.0;
    EnergyReport initial_energy;
    EnergyReport final_energy;
    double initial_mass = 0.0;
    double max_mass_drift = 0.0;  ///< max_t |mass(t) - mass(0)| / mass(0)
    double max_balance_residual = 0.0;
    double max_director_norm = 0.0;
    double director_bound = 0.0;  ///< max(C0, max|d0|)
    double max_galerkin_residual = 0.0;
    double max_u_L2 = 0.0;
    double max_density_integrability = 0.0;
    double artificial_pressure = 0.0;  ///< int delta rho^beta at t_final
    double clipped_measure = 0.0;
    LargeTimeMetrics final_metrics;
    double steady_residual = 0.0;
    double steady_stress_residual = 0.0;
    std::vector<std::vector<double>> rows;  ///< diagnostics time series
    std::vector<std::string> failures;      ///< violated invariant checks
    std::vector<std::string> warnings;
    FlowState final_state;

    bool passed() const { return failures.empty(); }
};

inline SteadyOptions steady_options(const SimConfig& c) {
    SteadyOptions o;
    o.tol = c.director.steady_tol;
    o.max_iters = c.director.max_iters;
    return o;
}

inline GinzburgLandauPenalty make_penalty(const SimConfig& c) {
    return GinzburgLandauPenalty(c.penalty.sigma0, c.penalty.c0);
}

inline std::vector<double> diagnostics_row(const FlowState& s, const EnergyReport& e, double balance,
                                           const LargeTimeMetrics& m, double integrability) {
    return {s.t,
            total_mass(s.rho),
            e.total,
            e.kinetic,
            e.pressure_potential,
            e.artificial_potential,
            e.elastic,
            e.penalty_potential,
            e.dissipation_viscous,
            e.dissipation_director,
            e.dissipation_artificial,
            balance,
            max_director_norm(s.dir.d),
            integrability,
            m.u_norm,
            m.rho_distance,
            m.d_distance};
}

inline void write_state_snapshots(const std::filesystem::path& dir, const std::string& tag, const FlowState& s,
                                  const GalerkinBasis& basis) {
    write_snapshot(dir / ("rho_" + tag + ".txt"), s.rho, s.t);
    write_snapshot(dir / ("u_" + tag + ".txt"), basis.realize(s.coeffs), s.t);
    write_snapshot(dir / ("d_" + tag + ".txt"), s.dir.d, s.t);
}

inline std::string summary_text(const RunSummary& r) {
    std::ostringstream o;
    auto kv = [&](const std::string& k, double v) { o << k << " = " << format_double(v) << '\n'; };
    o << "status = " << (r.passed() ? "pass" : "fail") << '\n';
    o << "steps = " << r.steps << '\n';
    kv("t_final", r.t_final);
    kv("initial_mass", r.initial_mass);
    kv("max_mass_drift", r.max_mass_drift);
    kv("E_initial", r.initial_energy.total);
    kv("E_final", r.final_energy.total);
    kv("E_kin_final", r.final_energy.kinetic);
    kv("E_press_final", r.final_energy.pressure_potential);
    kv("E_art_final", r.final_energy.artificial_potential);
    kv("E_elastic_final", r.final_energy.elastic);
    kv("E_penalty_final", r.final_energy.penalty_potential);
    kv("max_balance_residual", r.max_balance_residual);
    kv("max_director_norm", r.max_director_norm);
    kv("director_bound", r.director_bound);
    kv("max_galerkin_residual", r.max_galerkin_residual);
    kv("max_u_L2", r.max_u_L2);
    kv("max_density_integrability", r.max_density_integrability);
    kv("artificial_pressure_integral", r.artificial_pressure);
    kv("clipped_initial_measure", r.clipped_measure);
    kv("rho_distance", r.final_metrics.rho_distance);
    kv("u_L2", r.final_metrics.u_norm);
    kv("d_H1_distance", r.final_metrics.d_distance);
    kv("steady_director_residual", r.steady_residual);
    kv("steady_stress_residual", r.steady_stress_residual);
    for (const auto& w : r.warnings) o << "warning = " << w << '\n';
    for (const auto& f : r.failures) o << "failure = " << f << '\n';
    return o.str();
}

/// Coupled time loop. Per step, with dt = min(CFL, dt_max, sigma0^2/4,
/// t_end - t):
///   1. rho_new from the continuity step with the old velocity
///   2. d_new from the director step with the old velocity
///   3. c_new from the momentum step with rho_new and d_new
/// followed by the energy balance and Galerkin residual checks.
inline RunSummary run_simulation(const SimConfig& cfg, const RunOptions& opts = {}) {
    RunSummary sum;
    sum.warnings = validate_config(cfg);
    const Grid g = cfg.make_grid();
    const GalerkinBasis basis(g, cfg.galerkin.modes_per_axis);
    const auto penalty = make_penalty(cfg);
    const FluidParams& fp = cfg.fluid;
    const RegularizationParams& reg = cfg.reg;
    const double sigma = cfg.integrability_sigma();
    const std::filesystem::path out_dir = cfg.output.directory;

    InitialData init = build_initial_data(cfg, g);
    const double mass0 = total_mass(init.rho_delta);
    const auto sref = build_steady_reference(mass0, init.trace, penalty, g, steady_options(cfg), init.d0);
    if (cfg.initial.director == "steady") init = build_initial_data(cfg, g, &sref.d_s);

    if (auto bad = check_initial_invariants(init, reg); !bad.empty()) sum.failures.push_back("initial data: " + bad);
    sum.clipped_measure = init.clipped_measure;
    sum.steady_residual = sref.residual;
    sum.steady_stress_residual = steady_stress_residual(sref, BoundarySpec::dirichlet(init.trace), penalty, fp.lambda);
    sum.director_bound = max_principle_bound(penalty, *init.trace);
    sum.director_bound = std::max(sum.director_bound, max_director_norm(init.d0));
    sum.initial_mass = mass0;

    FlowState s{init.rho_delta, initial_coefficients(init.rho_delta, init.m_delta, basis), {init.d0, init.trace}, 0.0};
    EnergyReport e = energy(s, basis, fp, reg, penalty);
    sum.initial_energy = e;
    auto metrics = large_time_metrics(s, sref, basis, fp.gamma);
    double integ = density_integrability(s.rho, fp.gamma, sigma);
    sum.rows.push_back(diagnostics_row(s, e, 0.0, metrics, integ));
    sum.max_director_norm = max_director_norm(s.dir.d);
    sum.max_u_L2 = metrics.u_norm;
    sum.max_density_integrability = integ;

    const double dt_cap = std::min(cfg.time.dt_max, 0.25 * cfg.penalty.sigma0 * cfg.penalty.sigma0);
    const double t_end = cfg.time.t_end;
    int step = 0;
    try {
        while (s.t < t_end * (1.0 - 1e-12)) {
            const VectorField u = basis.realize(s.coeffs);
            const double dt = std::min({cfl_dt(u, g, cfg.time.safety), dt_cap, t_end - s.t});
            ++step;

            ScalarField rho_new = continuity_step(s.rho, u, reg.eps, dt);
            DirectorState d_new = director_step(s.dir, u, penalty, dt);
            VelocityCoeffs c_new = momentum_step(s.rho, rho_new, s.coeffs, d_new, fp, reg, penalty, basis, dt);
            VelocityCoeffs convect;
            for (int it = 1; it < cfg.galerkin.picard_iters; ++it) {
                convect = c_new;
                c_new = momentum_step(s.rho, rho_new, s.coeffs, d_new, fp, reg, penalty, basis, dt, &convect);
            }
            const double gres = momentum_residual(s.rho, rho_new, s.coeffs, c_new, d_new, fp, reg, penalty, basis, dt,
                                                  cfg.galerkin.picard_iters > 1 ? &convect : nullptr);

            FlowState next{std::move(rho_new), std::move(c_new), std::move(d_new), s.t + dt};
            const EnergyReport e_next = energy(next, basis, fp, reg, penalty);
            const double bal = energy_balance_residual(e, e_next, dt);
            s = std::move(next);
            e = e_next;

            sum.max_balance_residual = std::max(sum.max_balance_residual, bal);
            sum.max_galerkin_residual = std::max(sum.max_galerkin_residual, gres);
            sum.max_director_norm = std::max(sum.max_director_norm, max_director_norm(s.dir.d));
            const double mass = total_mass(s.rho);
            sum.max_mass_drift = std::max(sum.max_mass_drift, std::abs(mass - mass0) / std::max(mass0, 1e-300));
            sum.max_u_L2 = std::max(sum.max_u_L2, lp_norm(basis.realize(s.coeffs), 2.0));
            integ = density_integrability(s.rho, fp.gamma, sigma);
            sum.max_density_integrability = std::max(sum.max_density_integrability, integ);

            if (opts.observer) opts.observer({step, dt, &s, &e, bal, gres});

            const bool last = s.t >= t_end * (1.0 - 1e-12);
            if (step % cfg.time.log_every == 0 || last) {
                metrics = large_time_metrics(s, sref, basis, fp.gamma);
                sum.rows.push_back(diagnostics_row(s, e, bal, metrics, integ));
            }
            if (opts.write_files && cfg.output.snapshot_every > 0 && step % cfg.output.snapshot_every == 0) {
                char tag[16];
                std::snprintf(tag, sizeof tag, "%06d", step);
                write_state_snapshots(out_dir, tag, s, basis);
            }
        }
    } catch (const solver_error& err) {
        if (opts.write_files) {
            write_csv(out_dir / "diagnostics.csv", diagnostics_header(), sum.rows);
            write_state_snapshots(out_dir, "failed", s, basis);
        }
        throw run_aborted(step, err.what());
    }

    sum.steps = step;
    sum.t_final = s.t;
    sum.final_energy = e;
    sum.final_metrics = large_time_metrics(s, sref, basis, fp.gamma);
    sum.artificial_pressure = artificial_pressure_integral(s.rho, reg);
    sum.final_state = s;

    if (cfg.checks.enabled) {
        if (sum.max_mass_drift > cfg.checks.mass_tol)
            sum.failures.push_back("mass drift " + format_double(sum.max_mass_drift) + " exceeds " +
                                   format_double(cfg.checks.mass_tol));
        if (sum.max_director_norm > sum.director_bound + cfg.checks.max_principle_tol)
            sum.failures.push_back("max |d| " + format_double(sum.max_director_norm) + " exceeds bound " +
                                   format_double(sum.director_bound));
        if (e.total > sum.initial_energy.total + cfg.checks.energy_tol * std::abs(sum.initial_energy.total))
            sum.failures.push_back("energy grew from " + format_double(sum.initial_energy.total) + " to " +
                                   format_double(e.total));
        if (sum.max_galerkin_residual > cfg.checks.galerkin_tol)
            sum.failures.push_back("Galerkin residual " + format_double(sum.max_galerkin_residual) + " exceeds " +
                                   format_double(cfg.checks.galerkin_tol));
    }

    if (opts.write_files) {
        write_csv(out_dir / "diagnostics.csv", diagnostics_header(), sum.rows);
        auto out = open_output(out_dir / "summary.txt");
        out << summary_text(sum);
    }
    return sum;
}

/// ||rho_1 - rho_2||_{L^gamma} + ||u_1 - u_2||_{L2} + ||d_1 - d_2||_{H1}.
inline double state_distance(const FlowState& a, const FlowState& b, const GalerkinBasis& basis, double gamma) {
    const double dr = lp_norm(a.rho - b.rho, gamma);
    VelocityCoeffs dc = a.coeffs;
    for (std::size_t i = 0; i < dc.c.size(); ++i) dc.c[i] -= b.coeffs.c[i];
    const double du = lp_norm(basis.realize(dc), 2.0);
    const DirectorField dd = a.dir.d - b.dir.d;
    const double ddist = lp_norm(dd, 2.0) + h1_seminorm(dd, BoundarySpec::homogeneous_dirichlet());
    return dr + du + ddist;
}

struct ContinuationRow {
    std::string phase;  ///< "eps" or "delta"
    int level = 0;
    double eps = 0.0;
    double delta = 0.0;
    double distance = std::numeric_limits<double>::quiet_NaN();  ///< D_j to level j+1
    double artificial_pressure = 0.0;
    double clipped_measure = 0.0;
    double mass = 0.0;
    double E_final = 0.0;
};

struct ContinuationTable {
    std::vector<ContinuationRow> rows;
    std::vector<std::string> failures;
    bool passed() const { return failures.empty(); }
};

inline const char* continuation_header() {
    return "phase,level,eps,delta,D,artificial_pressure,clipped_measure,mass,E_final";
}

inline void write_continuation(const std::filesystem::path& path, const ContinuationTable& t) {
    auto out = open_output(path);
    out << continuation_header() << '\n';
    for (const auto& r : t.rows) {
        out << r.phase << ',' << r.level << ',' << format_double(r.eps) << ',' << format_double(r.delta) << ','
            << (std::isnan(r.distance) ? std::string() : format_double(r.distance)) << ','
            << format_double(r.artificial_pressure) << ',' << format_double(r.clipped_measure) << ','
            << format_double(r.mass) << ',' << format_double(r.E_final) << '\n';
    }
    if (!out) throw io_error("write failed for '" + path.string() + "'");
}

/// Trend check on one phase: D_{j+1} <= D_j for the last levels-2 entries.
inline bool distances_decrease(const std::vector<ContinuationRow>& phase) {
    std::vector<double> D;
    for (const auto& r : phase)
        if (!std::isnan(r.distance)) D.push_back(r.distance);
    for (std::size_t j = 1; j < D.size(); ++j)
        if (D[j] > D[j - 1]) return false;
    return true;
}

/// eps phase: delta = delta0, eps_j = eps0 2^-j; delta phase: eps fixed at
/// the smallest value, delta_j = delta0 2^-j. Member runs are independent.
inline ContinuationTable run_continuation(const SimConfig& cfg, int levels, const RunOptions& opts = {}) {
    if (levels < 3) throw config_error("continuation requires levels >= 3");
    const Grid g = cfg.make_grid();
    const GalerkinBasis basis(g, cfg.galerkin.modes_per_axis);
    const std::filesystem::path out_dir = cfg.output.directory;
    ContinuationTable table;
    RunOptions member;
    member.write_files = false;
    member.observer = opts.observer;

    auto phase = [&](const std::string& name, auto configure) {
        std::vector<ContinuationRow> rows;
        std::optional<FlowState> prev;
        for (int j = 0; j < levels; ++j) {
            SimConfig c = cfg;
            configure(c, j);
            RunSummary r;
            try {
                r = run_simulation(c, member);
            } catch (...) {
                table.rows.insert(table.rows.end(), rows.begin(), rows.end());
                if (opts.write_files) write_continuation(out_dir / "continuation.csv", table);
                throw;
            }
            for (const auto& f : r.failures)
                table.failures.push_back(name + " level " + std::to_string(j) + ": " + f);
            if (prev) rows.back().distance = state_distance(*prev, r.final_state, basis, cfg.fluid.gamma);
            rows.push_back({name, j, c.reg.eps, c.reg.delta, std::numeric_limits<double>::quiet_NaN(),
                            r.artificial_pressure, r.clipped_measure, total_mass(r.final_state.rho),
                            r.final_energy.total});
            prev = std::move(r.final_state);
        }
        if (!distances_decrease(rows)) table.failures.push_back(name + " phase: distances do not decrease");
        table.rows.insert(table.rows.end(), rows.begin(), rows.end());
    };

    const double eps0 = cfg.continuation.eps0, delta0 = cfg.continuation.delta0;
    const double eps_min = eps0 * std::ldexp(1.0, -(levels - 1));
    phase("eps", [&](SimConfig& c, int j) {
        c.reg.eps = eps0 * std::ldexp(1.0, -j);
        c.reg.delta = delta0;
    });
    phase("delta", [&](SimConfig& c, int j) {
        c.reg.eps = eps_min;
        c.reg.delta = delta0 * std::ldexp(1.0, -j);
    });
    if (opts.write_files) write_continuation(out_dir / "continuation.csv", table);
    return table;
}

}  // namespace nlc

#endif  // NLC_SIMULATION_HPP
