#include "pathlr/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "pathlr/analysis.hpp"

using namespace pathlr;

namespace {

struct Rig {
    GridStack grid;
    TimeGrid tg;
    ConvolutionKernel kernel;
};

Rig make_setup(const ProblemSpec& prob, double a_x, Index N_x, Index n) {
    Rig s{build_grid_stack(a_x, N_x, n), build_time_grid(prob.T, n, QuadratureRule::Trapezoid),
            {}};
    s.kernel = build_kernel(prob.sigma, s.tg.dt, s.grid);
    return s;
}

}  // namespace

TEST(SolverTest, FreeDiffusionMatchesGaussianClosedForm) {
    // V == 0: n convolution steps compose into one Gaussian of parameter
    // beta' = beta lambda_T / (beta + lambda_T), lambda_T = 1/(4 sigma T)
    ProblemSpec prob;
    prob.V = [](double, double) { return 0.0; };
    prob.f = [](double x) { return gaussian_density(1.0, x); };
    prob.sigma = 0.5;
    prob.T = 0.5;
    prob.name = "free";
    const Rig s = make_setup(prob, 6.0, 256, 16);

    const double lambda_T = 1.0 / (4.0 * prob.sigma * prob.T);
    const double beta_eff = 1.0 * lambda_T / (1.0 + lambda_T);
    Eigen::VectorXd exact(s.grid.M);
    for (Index i = 0; i < s.grid.M; ++i)
        exact[i] = gaussian_density(beta_eff, s.grid.point(1, i));

    const SolveReport dense = solve_dense_reference(prob, s.grid, s.tg, s.kernel);
    EXPECT_LT(relative_error(dense.u_final, exact), 1e-12);

    SolverConfig cfg;
    cfg.eps_c = 1e-12;
    cfg.dense_switch_k = 4;
    const SolveReport lr = solve(prob, s.grid, s.tg, s.kernel, cfg);
    EXPECT_LT(relative_error(lr.u_final, exact), 1e-11);
}

TEST(SolverTest, OscillatorMatchesClosedFormRecurrence) {
    const double beta = 1.0;
    const ProblemSpec prob = harmonic_problem(beta, 0.25, 1.0);
    const Rig s = make_setup(prob, 3.0, 300, 10);
    const Eigen::VectorXd exact = oscillator_exact(final_mesh(s.grid), s.tg, prob.sigma, beta);

    const SolveReport dense = solve_dense_reference(prob, s.grid, s.tg, s.kernel);
    EXPECT_LT(relative_error(dense.u_final, exact), 1e-11);

    SolverConfig cfg;
    cfg.eps_c = 1e-12;
    cfg.dense_switch_k = 4;
    const SolveReport lr = solve(prob, s.grid, s.tg, s.kernel, cfg);
    EXPECT_LT(relative_error(lr.u_final, exact), 1e-11);
    bool has_lowrank_step = false;
    for (const auto& st : lr.steps) has_lowrank_step |= (st.mode == StepMode::LowRank);
    EXPECT_TRUE(has_lowrank_step);
}

TEST(SolverTest, LowRankAgreesWithDenseReference) {
    const ProblemSpec prob = cauchy_problem(0.5, 1.0);
    const Rig s = make_setup(prob, 2.0, 128, 24);

    SolverConfig cfg;
    cfg.eps_c = 1e-10;
    cfg.dense_switch_k = 4;
    const SolveReport lr = solve(prob, s.grid, s.tg, s.kernel, cfg);
    const SolveReport dense = solve_dense_reference(prob, s.grid, s.tg, s.kernel, cfg);
    EXPECT_LT(relative_error_max(lr.u_final, dense.u_final), 50 * cfg.eps_c);
}

TEST(SolverTest, ReportRecordsStepsAndModes) {
    const ProblemSpec prob = cauchy_problem(0.5, 1.0);
    const Rig s = make_setup(prob, 2.0, 64, 12);
    SolverConfig cfg;
    cfg.dense_switch_k = 5;
    const SolveReport rep = solve(prob, s.grid, s.tg, s.kernel, cfg);
    ASSERT_EQ(rep.steps.size(), 12u);
    for (const auto& st : rep.steps) {
        if (st.k <= 5)
            EXPECT_EQ(st.mode, StepMode::Dense);
        else {
            EXPECT_EQ(st.mode, StepMode::LowRank);
            EXPECT_GE(st.rank, 1);
        }
    }
    EXPECT_EQ(rep.u_final.size(), s.grid.M);
    EXPECT_GT(rep.total_seconds, 0.0);
}

TEST(EvalFkTest, DeltaBasisHandCheck) {
    const Index M = 4, k = 2;
    ConvolutionKernel kern;
    kern.p = {0.4, 0.3, 0.2, 0.1};
    kern.p_rev.assign(kern.p.rbegin(), kern.p.rend());
    kern.mu.assign(4, 1.0);

    IterationState st;
    st.k = k;
    st.M = M;
    st.factors.B = Eigen::MatrixXd::Zero(M, 1);
    st.factors.B(0, 0) = 1.0;
    st.factors.V = Eigen::MatrixXd::Ones(k + 1, 1);
    st.factors.r = 1;
    st.conv = basis_convolutions(st.factors.B, kern);
    st.coeff = st.factors.V.transpose();

    // u = delta_0, all coefficients 1: s_{mM+l} = k_0[l] + t_0[l]
    const double expected[] = {0.4, 0.1, 0.2, 0.3, 0.4, 0.1, 0.2, 0.3};
    for (Index j = 0; j < k * M; ++j) EXPECT_NEAR(eval_f_k(st, j), expected[j], 1e-14);
    EXPECT_THROW(eval_f_k(st, k * M), std::out_of_range);
    EXPECT_THROW(eval_f_k(st, -1), std::out_of_range);
}

TEST(SolverTest, DenseReferenceHonorsMemoryBudget) {
    const ProblemSpec prob = cauchy_problem(0.5, 1.0);
    const Rig s = make_setup(prob, 2.0, 2048, 64);
    SolverConfig cfg;
    cfg.memory_budget_mb = 1;
    EXPECT_THROW(solve_dense_reference(prob, s.grid, s.tg, s.kernel, cfg), capacity_error);
}

TEST(SolverTest, NonFiniteInitialDataIsReported) {
    ProblemSpec prob = cauchy_problem(0.5, 1.0);
    prob.f = [](double x) { return x > 3.0 ? std::nan("") : 1.0 / (1.0 + x * x); };
    const Rig s = make_setup(prob, 2.0, 32, 8);
    try {
        solve_dense_reference(prob, s.grid, s.tg, s.kernel);
        FAIL() << "expected data_error";
    } catch (const data_error& e) {
        EXPECT_GT(e.coordinate, 3.0);
    }
}

TEST(SolverTest, UnconvergedCrossAbortsWithStepIndex) {
    ProblemSpec prob = cauchy_problem(0.5, 1.0);
    prob.f = [](double x) {
        return 1.0 / (1.0 + x * x) + 0.2 * std::exp(-x * x) * std::sin(15.0 * x);
    };
    const Rig s = make_setup(prob, 2.0, 256, 32);
    SolverConfig cfg;
    cfg.eps_c = 1e-12;
    cfg.r_max = 2;
    cfg.dense_switch_k = 4;
    try {
        solve(prob, s.grid, s.tg, s.kernel, cfg);
        FAIL() << "expected convergence_error";
    } catch (const convergence_error& e) {
        EXPECT_EQ(e.step, 32);
        EXPECT_GT(e.achieved, cfg.eps_c);
    }
}

TEST(SolverTest, NonnegativeDataStaysNonnegative) {
    ProblemSpec prob;
    prob.V = [](double x, double t) { return -0.3 + std::sin(x) * std::sin(x) + 0.1 * t; };
    prob.f = [](double x) { return gaussian_density(0.8, x - 0.2); };
    prob.sigma = 0.4;
    prob.T = 2.0;
    prob.name = "bounded-below";
    const Rig s = make_setup(prob, 4.0, 128, 20);
    SolverConfig cfg;
    cfg.dense_switch_k = 6;
    cfg.eps_c = 1e-11;
    const SolveReport rep = solve(prob, s.grid, s.tg, s.kernel, cfg);
    const double peak = rep.u_final.maxCoeff();
    EXPECT_GT(peak, 0.0);
    EXPECT_GE(rep.u_final.minCoeff(), -1e-12 * peak);
}

TEST(SolverTest, CauchyCoarsePointValue) {
    const ProblemSpec prob = cauchy_problem(0.5, 1.0);
    const Rig s = make_setup(prob, 2.0, 4000, 32);
    const SolveReport rep = solve(prob, s.grid, s.tg, s.kernel);
    EXPECT_NEAR(rep.u_final[4000], 0.6369792, 5e-6);
}

TEST(SolverTest, FreeDiffusionMassLossBoundedByGaussianTail) {
    const double beta = 2.0, sigma = 0.25, T = 0.5;
    ProblemSpec prob;
    prob.V = [](double, double) { return 0.0; };
    prob.f = [beta](double x) { return gaussian_density(beta, x); };
    prob.sigma = sigma;
    prob.T = T;
    const Rig s = make_setup(prob, 2.0, 256, 8);
    const SolveReport rep = solve_dense_reference(prob, s.grid, s.tg, s.kernel);
    double mass = 0.0;
    for (Index i = 0; i < s.grid.M; ++i) mass += s.grid.h_x * rep.u_final[i];
    // all mass loss comes from truncating the spread Gaussian to [-a_x, a_x)
    const double var_total = 1.0 / (2.0 * beta) + 2.0 * sigma * T;
    const double tail = std::erfc(s.grid.a_x / std::sqrt(2.0 * var_total));
    EXPECT_LE(1.0 - mass, 1.3 * tail);
    EXPECT_GE(1.0 - mass, 0.2 * tail);
}

TEST(SolverTest, SingleStepProblemRuns) {
    const ProblemSpec prob = cauchy_problem(0.5, 0.25);
    const Rig s = make_setup(prob, 2.0, 64, 1);
    const SolveReport rep = solve(prob, s.grid, s.tg, s.kernel);
    EXPECT_EQ(rep.steps.size(), 1u);
    EXPECT_TRUE(rep.u_final.allFinite());
}
