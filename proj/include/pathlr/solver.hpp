#ifndef PATHLR_SOLVER_HPP
#define PATHLR_SOLVER_HPP

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "pathlr/convolution.hpp"
#include "pathlr/cross.hpp"
#include "pathlr/mesh.hpp"
#include "pathlr/problems.hpp"

namespace pathlr {

struct SolverConfig {
    double eps_c = 1e-10;
    Index r0 = 4;
    Index r_max = 64;
    Index dense_switch_k = 20;       // steps k <= threshold run the full convolution
    bool dense_on_full_rank = false; // also switch once the rank hits the column count
    Index memory_budget_mb = 4096;   // cap for dense-mode materialization
};

enum class StepMode { LowRank, Dense };

struct SolveReport {
    Eigen::VectorXd u_final;  // u^{(n)}(x_i, T) on the level-1 mesh
    struct Step {
        Index k = 0;
        StepMode mode = StepMode::Dense;
        Index rank = 0;
        double seconds = 0.0;
    };
    std::vector<Step> steps;
    double total_seconds = 0.0;
    SolverConfig config;

    Index max_rank() const {
        Index r = 0;
        for (const auto& s : steps) r = std::max(r, s.rank);
        return r;
    }
};

/// State after a low-rank step k: factors of Phi^{(k+1)} and the basis
/// convolutions needed to reconstruct any entry of the next iterate.
struct IterationState {
    Index k = 0;
    Index M = 0;
    LowRankFactors factors;   // B: M x r, V: (k+1) x r
    BasisConvolutions conv;   // k_i, t_i for B's columns (r x M each)
    Eigen::MatrixXd coeff;    // V transposed, r x (k+1)
};

/// Reconstructs s_j = sum_i alpha_{m,i} k_i[l] + beta_{m,i} t_i[l] with
/// m = floor(j / M), l = j mod M and beta_{m,i} = alpha_{m+1,i}; O(r) per
/// entry.  Valid for 0 <= j < k*M; the one further computable value of the
/// convolution is deliberately out of range.
inline double eval_f_k(const IterationState& st, Index j) {
    if (j < 0 || j >= st.k * st.M)
        throw std::out_of_range("eval_f_k: index " + std::to_string(j) +
                                " outside [0, " + std::to_string(st.k * st.M) + ")");
    const Index m = j / st.M;
    const Index l = j % st.M;
    return st.coeff.col(m).dot(st.conv.k_vecs.col(l)) +
           st.coeff.col(m + 1).dot(st.conv.t_vecs.col(l));
}

/// Level-1 mesh as a vector (the abscissas of u_final).
inline Eigen::VectorXd final_mesh(const GridStack& grid) {
    Eigen::VectorXd x(grid.M);
    for (Index i = 0; i < grid.M; ++i) x[i] = grid.point(1, i);
    return x;
}

namespace detail {

class StepTimer {
public:
    StepTimer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

enum class PrevKind { Init, LowRank, Dense };

}  // namespace detail

namespace detail {

inline SolveReport run_iteration(const ProblemSpec& prob, const GridStack& grid,
                                 const TimeGrid& tg, const ConvolutionKernel& kernel,
                                 const SolverConfig& cfg, bool force_dense) {
    const Index n = tg.n;
    const Index M = grid.M;
    if (grid.levels < n)
        throw std::invalid_argument("grid stack has fewer levels than time steps");
    if (cfg.dense_switch_k < 1)
        throw std::invalid_argument("dense_switch_k must be at least 1");
    if (static_cast<Index>(kernel.p.size()) != M)
        throw std::invalid_argument("kernel length does not match the mesh");

    SolveReport rep;
    rep.config = cfg;
    StepTimer total;

    PrevKind prev = PrevKind::Init;
    IterationState state;
    Eigen::VectorXd dense_s;
    bool dense_from_now = force_dense;
    Index seed_rank = cfg.r0;

    for (Index k = n; k >= 1; --k) {
        StepTimer timer;
        const double wk = tg.w[static_cast<size_t>(k)];
        const double t_k = tg.tau(n - k);
        const Index level = k + 1;
        const Index level_pts = level * M;

        auto base_value = [&](Index j) -> double {
            switch (prev) {
                case PrevKind::Init: {
                    const double x = grid.point(level, j);
                    const double v = prob.f(x);
                    if (!std::isfinite(v)) throw data_error("non-finite initial value", x);
                    return v;
                }
                case PrevKind::LowRank:
                    return eval_f_k(state, j);
                case PrevKind::Dense:
                    return dense_s[j];
            }
            return 0.0;
        };
        auto phi_value = [&](Index j) -> double {
            const double x = grid.point(level, j);
            const double v = prob.V(x, t_k);
            if (!std::isfinite(v)) throw data_error("non-finite potential value", x);
            return base_value(j) * std::exp(-wk * v * tg.dt);
        };

        const bool use_dense = dense_from_now || k <= cfg.dense_switch_k;
        if (use_dense) {
            const double bytes = 8.0 * 8.0 * static_cast<double>(level_pts);
            if (bytes > static_cast<double>(cfg.memory_budget_mb) * (1 << 20))
                throw capacity_error("dense step needs ~" +
                                     std::to_string(static_cast<long long>(bytes / (1 << 20))) +
                                     " MiB, budget is " + std::to_string(cfg.memory_budget_mb) +
                                     " MiB");
            Eigen::VectorXd phi(level_pts);
            for (Index j = 0; j < level_pts; ++j) phi[j] = phi_value(j);

            ConvolutionEngine engine(level_pts + M - 1, FftSizing::Smooth);
            engine.set_kernel(kernel.p_rev);
            Eigen::VectorXd full(level_pts + M - 1);
            engine.convolve_with_kernel(std::span<const double>(phi.data(), phi.size()),
                                        std::span<double>(full.data(), full.size()));
            dense_s = full.segment(M - 1, k * M);
            prev = PrevKind::Dense;
            dense_from_now = true;
            rep.steps.push_back({k, StepMode::Dense, 0, timer.seconds()});
            continue;
        }

        // low-rank step: cross-approximate the lazy Phi^{(k+1)} (M x (k+1))
        std::unordered_map<Index, double> cache;
        cache.reserve(4096);
        LazyMatrix lazy;
        lazy.nrows = M;
        lazy.ncols = level;
        lazy.eval = [&](Index i, Index m) {
            const Index j = m * M + i;
            auto it = cache.find(j);
            if (it != cache.end()) return it->second;
            const double v = phi_value(j);
            cache.emplace(j, v);
            return v;
        };

        const Index r_cap = std::min<Index>({cfg.r_max, M, level});
        LowRankFactors fac =
            cross_approximate(lazy, cfg.eps_c, std::min(seed_rank, r_cap), r_cap);
        if (!fac.converged)
            throw convergence_error("cross approximation did not reach the requested accuracy",
                                    k, fac.residual_zeta);
        state.k = k;
        state.M = M;
        state.conv = basis_convolutions(fac.B, kernel);
        state.coeff = fac.V.transpose();
        state.factors = std::move(fac);
        prev = PrevKind::LowRank;
        // the configured r0 floors the window: seeding purely from the
        // previous rank can leave too few samples to discover columns with
        // disjoint support (localized initial data)
        seed_rank = std::max<Index>(state.factors.r, cfg.r0);
        if (cfg.dense_on_full_rank && state.factors.r >= level) dense_from_now = true;
        rep.steps.push_back({k, StepMode::LowRank, state.factors.r, timer.seconds()});
    }

    // final assembly u = F_1 * exp(-w_0 V(x, T) dt) on the level-1 mesh
    rep.u_final.resize(M);
    const double w0 = tg.w.front();
    for (Index i = 0; i < M; ++i) {
        const double x = grid.point(1, i);
        const double v = prob.V(x, tg.T);
        if (!std::isfinite(v)) throw data_error("non-finite potential value", x);
        rep.u_final[i] = dense_s[i] * std::exp(-w0 * v * tg.dt);
        if (!std::isfinite(rep.u_final[i]))
            throw data_error("non-finite solution value", x);
    }
    rep.total_seconds = total.seconds();
    return rep;
}

}  // namespace detail

/// Backward iteration k = n..1 with per-step cross approximation of the
/// integrand matrix and FFT basis convolutions; steps at or below
/// dense_switch_k run one full-array FFT convolution instead.
inline SolveReport solve(const ProblemSpec& prob, const GridStack& grid, const TimeGrid& tg,
                         const ConvolutionKernel& kernel, const SolverConfig& cfg = {}) {
    return detail::run_iteration(prob, grid, tg, kernel, cfg, /*force_dense=*/false);
}

/// Full-array FFT iteration without low-rank compression; the oracle and
/// timing baseline.  Needs the whole top-level array in memory.
inline SolveReport solve_dense_reference(const ProblemSpec& prob, const GridStack& grid,
                                         const TimeGrid& tg, const ConvolutionKernel& kernel,
                                         const SolverConfig& cfg = {}) {
    return detail::run_iteration(prob, grid, tg, kernel, cfg, /*force_dense=*/true);
}

}  // namespace pathlr

#endif  // PATHLR_SOLVER_HPP
