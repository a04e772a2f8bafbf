#ifndef PATHLR_RUNNER_HPP
#define PATHLR_RUNNER_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pathlr/analysis.hpp"
#include "pathlr/config.hpp"
#include "pathlr/monte_carlo.hpp"
#include "pathlr/solver.hpp"

namespace pathlr {

namespace detail {

inline std::string fmt(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline std::string fmt_seconds(double v, bool enabled) {
    if (!enabled) return "";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace detail

struct RunArtifacts {
    ProblemSpec prob;
    GridStack grid;
    TimeGrid tg;
    ConvolutionKernel kernel;
};

inline RunArtifacts make_artifacts(const RunConfig& cfg, Index n) {
    RunArtifacts a{cfg.make_problem(), build_grid_stack(cfg.a_x, cfg.resolved_N_x(), n),
                   build_time_grid(cfg.resolved_T(), n, parse_rule(cfg.time_rule)),
                   {}};
    a.kernel = build_kernel(a.prob.sigma, a.tg.dt, a.grid, parse_rule(cfg.spatial_rule));
    return a;
}

/// One solve on the configured problem; CSV columns: x,u.
inline std::string run_solve_csv(const RunConfig& cfg, bool dense_reference,
                                 SolveReport* report_out = nullptr) {
    cfg.validate();
    const RunArtifacts a = make_artifacts(cfg, cfg.n);
    const SolveReport rep = dense_reference
                                ? solve_dense_reference(a.prob, a.grid, a.tg, a.kernel,
                                                        cfg.solver_config())
                                : solve(a.prob, a.grid, a.tg, a.kernel, cfg.solver_config());
    std::ostringstream os;
    os << "x,u\n";
    for (Index i = 0; i < a.grid.M; ++i)
        os << detail::fmt(a.grid.point(1, i)) << "," << detail::fmt(rep.u_final[i]) << "\n";
    if (report_out) *report_out = rep;
    return os.str();
}

/// Convergence study over a doubling n-sweep.  The error estimate of u_n is
/// read off the (u_n, u_{n/2}) pair; p4/eps4 repeat the construction on the
/// Richardson-extrapolated solutions.
inline ConvergenceTable run_convergence(const RunConfig& cfg,
                                        std::vector<SolveReport>* reports = nullptr) {
    cfg.validate();
    const std::vector<Index> sweep = cfg.sweep_or_single();
    ConvergenceTable table;
    table.T = cfg.resolved_T();

    std::vector<Eigen::VectorXd> u, v;
    for (size_t i = 0; i < sweep.size(); ++i) {
        const RunArtifacts a = make_artifacts(cfg, sweep[i]);
        const SolveReport rep = solve(a.prob, a.grid, a.tg, a.kernel, cfg.solver_config());
        u.push_back(rep.u_final);
        v.push_back(i >= 1 ? richardson(u[i], u[i - 1], 2) : Eigen::VectorXd());

        ConvergenceRow row;
        row.n = sweep[i];
        row.dt = a.tg.dt;
        row.rank = rep.max_rank();
        row.wall_seconds = rep.total_seconds;
        if (i >= 1) {
            row.eps2 = (u[i] - u[i - 1]).norm() / (3.0 * u[i].norm());
            row.eps2_max = (u[i] - u[i - 1]).cwiseAbs().maxCoeff() /
                           (3.0 * u[i].cwiseAbs().maxCoeff());
        }
        if (i >= 2) {
            row.p2 = runge_order(u[i], u[i - 1], u[i - 2]);
            row.eps4 = (v[i] - v[i - 1]).norm() / (15.0 * v[i].norm());
        }
        if (i >= 3) row.p4 = runge_order(v[i], v[i - 1], v[i - 2]);
        table.rows.push_back(row);
        if (reports) reports->push_back(rep);
    }
    return table;
}

inline std::string convergence_csv(const ConvergenceTable& table, bool timings) {
    std::ostringstream os;
    os << "T,n,dt,p2,eps2,p4,eps4,rank,wall_seconds\n";
    for (const auto& r : table.rows) {
        os << detail::fmt(table.T) << "," << r.n << "," << detail::fmt(r.dt) << ","
           << detail::fmt(r.p2) << "," << detail::fmt(r.eps2) << "," << detail::fmt(r.p4)
           << "," << detail::fmt(r.eps4) << "," << r.rank << ","
           << detail::fmt_seconds(r.wall_seconds, timings) << "\n";
    }
    return os.str();
}

/// Monte Carlo vs low-rank comparison at the configured evaluation point.
/// CSV columns: n,dt,u_mc,u_lr,u_exact,eps_mc,eps_lr,mc_seconds,lr_seconds.
inline std::string run_compare_mc(const RunConfig& cfg) {
    cfg.validate();
    if (!cfg.has_mc) throw config_error("compare-mc needs an [mc] section or --mc-* flags");

    std::ostringstream os;
    os << "n,dt,u_mc,u_lr,u_exact,eps_mc,eps_lr,mc_seconds,lr_seconds\n";
    for (Index n : cfg.sweep_or_single()) {
        const RunArtifacts a = make_artifacts(cfg, n);
        const Index idx = static_cast<Index>(std::llround((cfg.mc.x0 + cfg.a_x) / a.grid.h_x));
        if (idx < 0 || idx >= a.grid.M ||
            std::abs(a.grid.point(1, idx) - cfg.mc.x0) > 0.5 * a.grid.h_x + 1e-12)
            throw config_error("mc.x0 must lie on the final mesh");

        detail::StepTimer lr_timer;
        const SolveReport rep = solve(a.prob, a.grid, a.tg, a.kernel, cfg.solver_config());
        const double lr_seconds = lr_timer.seconds();
        const double u_lr = rep.u_final[idx];

        McConfig mcfg{cfg.mc.K, cfg.mc.seed, cfg.mc.x0, cfg.mc.antithetic};
        detail::StepTimer mc_timer;
        const McResult mc = mc_estimate(a.prob, a.tg, mcfg);
        const double mc_seconds = mc_timer.seconds();

        double u_exact = std::numeric_limits<double>::quiet_NaN();
        if (cfg.problem == "cauchy") u_exact = cauchy_exact(cfg.mc.x0, a.tg.T);
        if (cfg.problem == "harmonic") {
            Eigen::VectorXd pt(1);
            pt << cfg.mc.x0;
            u_exact = oscillator_exact(pt, a.tg, a.prob.sigma, cfg.beta)[0];
        }
        const double eps_mc = std::isnan(u_exact)
                                  ? u_exact
                                  : std::abs(mc.estimate - u_exact) / std::abs(u_exact);
        const double eps_lr =
            std::isnan(u_exact) ? u_exact : std::abs(u_lr - u_exact) / std::abs(u_exact);

        os << n << "," << detail::fmt(a.tg.dt) << "," << detail::fmt(mc.estimate) << ","
           << detail::fmt(u_lr) << "," << detail::fmt(u_exact) << "," << detail::fmt(eps_mc)
           << "," << detail::fmt(eps_lr) << "," << detail::fmt_seconds(mc_seconds, cfg.timings)
           << "," << detail::fmt_seconds(lr_seconds, cfg.timings) << "\n";
    }
    return os.str();
}

/// Wall-time scaling of the low-rank solve against the dense reference.
/// CSV columns: n,dt,lowrank_seconds,dense_seconds; a dense run over the
/// memory budget is marked "skipped".
inline std::string run_scaling(const RunConfig& cfg, bool with_dense) {
    cfg.validate();
    std::ostringstream os;
    os << "n,dt,lowrank_seconds,dense_seconds\n";
    for (Index n : cfg.sweep_or_single()) {
        const RunArtifacts a = make_artifacts(cfg, n);
        std::string lr_field = "skipped";
        try {
            detail::StepTimer lr_timer;
            solve(a.prob, a.grid, a.tg, a.kernel, cfg.solver_config());
            lr_field = detail::fmt_seconds(lr_timer.seconds(), cfg.timings);
        } catch (const capacity_error&) {
        }
        std::string dense_field;
        if (with_dense) {
            try {
                detail::StepTimer d_timer;
                solve_dense_reference(a.prob, a.grid, a.tg, a.kernel, cfg.solver_config());
                dense_field = detail::fmt_seconds(d_timer.seconds(), cfg.timings);
            } catch (const capacity_error&) {
                dense_field = "skipped";
            }
        }
        os << n << "," << detail::fmt(a.tg.dt) << "," << lr_field << "," << dense_field
           << "\n";
    }
    return os.str();
}

/// Singular-value table of the reshaped Hermite basis matrices.
/// CSV columns: l,sigma1,s2..s9 (relative),eps_rank.
inline std::string run_hermite_study(Index l_max, Index nrows, Index ncols, double eps,
                                     double a_x) {
    const auto table = hermite_rank_study(l_max, nrows, ncols, eps, a_x);
    std::ostringstream os;
    os << "l,sigma1,s2,s3,s4,s5,s6,s7,s8,s9,eps_rank\n";
    for (const auto& row : table) {
        os << row.l << "," << detail::fmt(row.sv.size() > 0 ? row.sv[0] : 0.0);
        for (Index i = 1; i < 9; ++i) {
            os << ",";
            if (i < row.sv.size() && row.sv[0] > 0.0) os << detail::fmt(row.sv[i] / row.sv[0]);
        }
        os << "," << row.rank << "\n";
    }
    return os.str();
}

/// Writes text to the configured sink (file path or stdout).
inline void emit_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write output file: " + path);
    out << text;
}

}  // namespace pathlr

#endif  // PATHLR_RUNNER_HPP
