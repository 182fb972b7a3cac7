// Batch driver: run | continuation | steady | check.
// Exit codes: 0 pass, 1 invariant failure, 2 config error, 3 solver error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "nlc/nlc.hpp"

namespace {

enum Exit { ok = 0, invariant_failure = 1, config_failure = 2, solver_failure = 3 };

nlc::ParsedConfig load(const std::string& path, const std::string& out_override) {
    auto parsed = nlc::load_config(path);
    if (!out_override.empty()) parsed.config.output.directory = out_override;
    for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << '\n';
    return parsed;
}

int cmd_run(const nlc::SimConfig& cfg) {
    nlc::RunOptions opts;
    opts.observer = [&](const nlc::StepInfo& s) {
        if (s.step % cfg.time.log_every == 0)
            std::cout << "step " << s.step << "  t " << s.state->t << "  E " << s.energy->total << "  balance "
                      << s.balance_residual << '\n';
    };
    const auto r = nlc::run_simulation(cfg, opts);
    std::cout << nlc::summary_text(r);
    std::cout << "outputs written to " << cfg.output.directory << '\n';
    return r.passed() ? ok : invariant_failure;
}

int cmd_continuation(const nlc::SimConfig& cfg, int levels) {
    const auto t = nlc::run_continuation(cfg, levels);
    std::cout << nlc::continuation_header() << '\n';
    for (const auto& r : t.rows)
        std::cout << r.phase << ',' << r.level << ',' << r.eps << ',' << r.delta << ',' << r.distance << ','
                  << r.artificial_pressure << ',' << r.clipped_measure << ',' << r.mass << ',' << r.E_final << '\n';
    for (const auto& f : t.failures) std::cout << "failure: " << f << '\n';
    return t.passed() ? ok : invariant_failure;
}

int cmd_steady(const nlc::SimConfig& cfg) {
    const nlc::Grid g = cfg.make_grid();
    const auto init = nlc::build_initial_data(cfg, g);
    const auto penalty = nlc::make_penalty(cfg);
    const auto ref = nlc::build_steady_reference(nlc::total_mass(init.rho_delta), init.trace, penalty, g,
                                                 nlc::steady_options(cfg), init.d0);
    const double stress =
        nlc::steady_stress_residual(ref, nlc::BoundarySpec::dirichlet(init.trace), penalty, cfg.fluid.lambda);
    const std::filesystem::path dir = cfg.output.directory;
    nlc::write_snapshot(dir / "d_steady.txt", ref.d_s, 0.0);
    std::cout << "rho_s = " << nlc::format_double(ref.rho_s) << '\n'
              << "residual = " << nlc::format_double(ref.residual) << '\n'
              << "stress_residual = " << nlc::format_double(stress) << '\n'
              << "written " << (dir / "d_steady.txt").string() << '\n';
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compressible nematic liquid crystal flow solver"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    int levels = 0;

    auto add = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("config", config_path, "configuration file")->required();
        sub->add_option("--out", out_dir, "override output.directory");
        return sub;
    };
    auto* run = add("run", "coupled time integration");
    auto* cont = add("continuation", "eps then delta halving study");
    cont->add_option("--levels", levels, "number of levels per phase (>= 3)");
    auto* steady = add("steady", "steady director only");
    auto* check = add("check", "parse and validate the configuration");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto parsed = load(config_path, out_dir);
        const auto& cfg = parsed.config;
        if (*check) {
            std::cout << "configuration ok\n";
            return ok;
        }
        if (*run) return cmd_run(cfg);
        if (*cont) return cmd_continuation(cfg, levels > 0 ? levels : cfg.continuation.levels);
        if (*steady) return cmd_steady(cfg);
    } catch (const nlc::invalid_input& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_failure;
    } catch (const nlc::solver_error& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return solver_failure;
    } catch (const nlc::io_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return solver_failure;
    }
    return ok;
}
