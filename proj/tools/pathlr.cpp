// Command-line driver: solves the reaction-diffusion benchmarks through the
// low-rank convolution iteration and emits CSV tables (convergence studies,
// Monte Carlo comparisons, wall-time scaling, Hermite spectra).

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pathlr/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOpts {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "config file (key = value, [mc] section)");
    auto opt = [cmd, &o](const char* flag, const char* key, const char* desc) {
        cmd->add_option_function<std::string>(
               flag, [&o, key](const std::string& v) { o.overrides.emplace_back(key, v); },
               desc)
            ->type_name("VAL");
    };
    opt("--problem", "problem", "harmonic | cauchy | impurity | custom");
    opt("--V", "V", "custom dissipation rate V(x,t), expression over x,t");
    opt("--f", "f", "custom initial density f(x), expression over x");
    opt("--sigma", "sigma", "diffusion coefficient");
    opt("--T", "T", "final time");
    opt("--n", "n", "number of time steps");
    opt("--n-sweep", "n_sweep", "comma-separated doubling sweep of n");
    opt("--a-x", "a_x", "half-width of the final spatial window");
    opt("--N-x", "N_x", "half mesh count (M = 2 N_x)");
    opt("--beta", "beta", "width of the harmonic initial Gaussian");
    opt("--eps-c", "eps_c", "cross-approximation accuracy");
    opt("--r0", "r0", "initial rank guess");
    opt("--r-max", "r_max", "rank cap");
    opt("--dense-switch", "dense_switch_k", "run direct convolutions for steps k <= this");
    opt("--dense-on-full-rank", "dense_on_full_rank",
        "also switch to direct convolutions when the rank reaches the column count");
    opt("--time-rule", "time_rule", "trapezoid | rectangle");
    opt("--spatial-rule", "spatial_rule", "rectangle | trapezoid");
    opt("--memory-budget-mb", "memory_budget_mb", "memory cap for dense-mode arrays");
    opt("--timings", "timings", "emit wall-time columns (on/off)");
    opt("--output", "output", "output CSV path (default: stdout)");
    opt("--mc-K", "mc.K", "Monte Carlo trial count");
    opt("--mc-seed", "mc.seed", "Monte Carlo RNG seed");
    opt("--mc-x0", "mc.x0", "Monte Carlo evaluation point");
    opt("--mc-antithetic", "mc.antithetic", "antithetic increment pairs (on/off)");
}

pathlr::RunConfig build_config(const CommonOpts& o) {
    pathlr::RunConfig cfg =
        o.config_path.empty() ? pathlr::RunConfig{} : pathlr::RunConfig::load(o.config_path);
    for (const auto& [key, value] : o.overrides) {
        if (key.rfind("mc.", 0) == 0) {
            cfg.set("mc", key.substr(3), value);
            cfg.has_mc = true;
        } else {
            cfg.set("", key, value);
        }
    }
    return cfg;
}

int guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const pathlr::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const pathlr::expr_error& e) {
        std::fprintf(stderr, "expression error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"low-rank path-integral solver for 1-D reaction-diffusion benchmarks"};
    app.require_subcommand(1);

    CommonOpts solve_opts, conv_opts, mc_opts, scaling_opts;
    bool solve_dense = false;
    bool scaling_dense = false;

    CLI::App* solve_cmd =
        app.add_subcommand("solve", "solve one run and write u(x, T) samples");
    add_common_flags(solve_cmd, solve_opts);
    solve_cmd->add_flag("--dense", solve_dense, "use the dense reference iteration");

    CLI::App* conv_cmd =
        app.add_subcommand("convergence", "order/error study over a doubling n-sweep");
    add_common_flags(conv_cmd, conv_opts);

    CLI::App* mc_cmd =
        app.add_subcommand("compare-mc", "Monte Carlo vs low-rank at a fixed point");
    add_common_flags(mc_cmd, mc_opts);

    CLI::App* scaling_cmd = app.add_subcommand("scaling", "wall-time scaling study");
    add_common_flags(scaling_cmd, scaling_opts);
    scaling_cmd->add_flag("--dense", scaling_dense, "also time the dense reference");

    CLI::App* hermite_cmd =
        app.add_subcommand("hermite-study", "singular values of reshaped Hermite bases");
    long long h_lmax = 32, h_nrows = 8000, h_ncols = 1024;
    double h_eps = 1e-8, h_ax = 2.0;
    std::string h_output;
    hermite_cmd->add_option("--l-max", h_lmax, "highest Hermite order");
    hermite_cmd->add_option("--nrows", h_nrows, "matrix rows (window point count M)");
    hermite_cmd->add_option("--ncols", h_ncols, "matrix columns (window count)");
    hermite_cmd->add_option("--eps", h_eps, "relative eps-rank threshold");
    hermite_cmd->add_option("--a-x", h_ax, "window half-width");
    hermite_cmd->add_option("--output", h_output, "output CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (solve_cmd->parsed()) {
        return guarded([&] {
            const pathlr::RunConfig cfg = build_config(solve_opts);
            pathlr::SolveReport rep;
            const std::string csv = pathlr::run_solve_csv(cfg, solve_dense, &rep);
            pathlr::emit_output(csv, cfg.output);
            std::fprintf(stderr, "solved %s: n=%lld, M=%lld, max rank %lld, %.3f s\n",
                         cfg.problem.c_str(), static_cast<long long>(cfg.n),
                         static_cast<long long>(2 * cfg.resolved_N_x()),
                         static_cast<long long>(rep.max_rank()), rep.total_seconds);
        });
    }
    if (conv_cmd->parsed()) {
        return guarded([&] {
            const pathlr::RunConfig cfg = build_config(conv_opts);
            const pathlr::ConvergenceTable table = pathlr::run_convergence(cfg);
            pathlr::emit_output(pathlr::convergence_csv(table, cfg.timings), cfg.output);
            // max-norm error estimates, kept out of the fixed CSV schema
            for (const auto& row : table.rows)
                if (!std::isnan(row.eps2_max))
                    std::fprintf(stderr, "n=%lld eps2_max=%.6g\n",
                                 static_cast<long long>(row.n), row.eps2_max);
        });
    }
    if (mc_cmd->parsed()) {
        return guarded([&] {
            const pathlr::RunConfig cfg = build_config(mc_opts);
            pathlr::emit_output(pathlr::run_compare_mc(cfg), cfg.output);
        });
    }
    if (scaling_cmd->parsed()) {
        return guarded([&] {
            const pathlr::RunConfig cfg = build_config(scaling_opts);
            pathlr::emit_output(pathlr::run_scaling(cfg, scaling_dense), cfg.output);
        });
    }
    if (hermite_cmd->parsed()) {
        return guarded([&] {
            pathlr::emit_output(
                pathlr::run_hermite_study(h_lmax, h_nrows, h_ncols, h_eps, h_ax), h_output);
        });
    }
    return kExitConfig;
}
