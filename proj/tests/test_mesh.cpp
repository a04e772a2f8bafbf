#include "pathlr/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace pathlr;

TEST(TimeGridTest, TrapezoidWeights) {
    const TimeGrid tg = build_time_grid(1.0, 4, QuadratureRule::Trapezoid);
    EXPECT_DOUBLE_EQ(tg.dt, 0.25);
    ASSERT_EQ(tg.w.size(), 5u);
    EXPECT_DOUBLE_EQ(tg.w[0], 0.5);
    EXPECT_DOUBLE_EQ(tg.w[1], 1.0);
    EXPECT_DOUBLE_EQ(tg.w[2], 1.0);
    EXPECT_DOUBLE_EQ(tg.w[3], 1.0);
    EXPECT_DOUBLE_EQ(tg.w[4], 0.5);
}

TEST(TimeGridTest, PaperScaleStep) {
    const TimeGrid tg = build_time_grid(10.0, 100, QuadratureRule::Trapezoid);
    EXPECT_DOUBLE_EQ(tg.dt, 0.1);
    EXPECT_EQ(tg.w.size(), 101u);
}

TEST(TimeGridTest, SingleStep) {
    const TimeGrid tg = build_time_grid(1.0, 1, QuadratureRule::Trapezoid);
    ASSERT_EQ(tg.w.size(), 2u);
    EXPECT_DOUBLE_EQ(tg.w[0], 0.5);
    EXPECT_DOUBLE_EQ(tg.w[1], 0.5);
}

TEST(TimeGridTest, RectangleWeights) {
    const TimeGrid tg = build_time_grid(2.0, 4, QuadratureRule::Rectangle);
    EXPECT_DOUBLE_EQ(tg.w[0], 1.0);
    EXPECT_DOUBLE_EQ(tg.w[3], 1.0);
    EXPECT_DOUBLE_EQ(tg.w[4], 0.0);
}

TEST(TimeGridTest, WeightsSumToN) {
    for (Index n : {1, 2, 7, 100, 513}) {
        const TimeGrid tg = build_time_grid(3.0, n, QuadratureRule::Trapezoid);
        double sum = 0.0;
        for (double w : tg.w) sum += w;
        EXPECT_DOUBLE_EQ(sum, static_cast<double>(n));
        EXPECT_NEAR(sum * tg.dt, tg.T, 1e-12 * tg.T);
    }
}

TEST(TimeGridTest, RejectsBadArguments) {
    EXPECT_THROW(build_time_grid(0.0, 4, QuadratureRule::Trapezoid), std::invalid_argument);
    EXPECT_THROW(build_time_grid(-1.0, 4, QuadratureRule::Trapezoid), std::invalid_argument);
    EXPECT_THROW(build_time_grid(1.0, 0, QuadratureRule::Trapezoid), std::invalid_argument);
}

TEST(GridStackTest, PaperBaseWindow) {
    const GridStack g = build_grid_stack(2.0, 4000, 1);
    EXPECT_DOUBLE_EQ(g.h_x, 5e-4);
    EXPECT_EQ(g.M, 8000);
    EXPECT_DOUBLE_EQ(g.point(1, 0), -2.0);
    EXPECT_NEAR(g.point(1, g.M - 1), 2.0 - g.h_x, 1e-14);
    EXPECT_EQ(g.level_size(1), 8000);
}

TEST(GridStackTest, HandEnumerableLevels) {
    const GridStack g = build_grid_stack(1.0, 1, 3);
    EXPECT_DOUBLE_EQ(g.h_x, 1.0);
    EXPECT_EQ(g.M, 2);
    const double expected[] = {-3.0, -2.0, -1.0, 0.0, 1.0, 2.0};
    ASSERT_EQ(g.level_size(3), 6);
    for (Index i = 0; i < 6; ++i) EXPECT_DOUBLE_EQ(g.point(3, i), expected[i]);
}

TEST(GridStackTest, DeepLevelDomain) {
    const GridStack g = build_grid_stack(2.0, 4000, 8192);
    EXPECT_DOUBLE_EQ(g.point(8192, 0), -16384.0);
    EXPECT_NEAR(g.point(8192, g.level_size(8192) - 1), 16384.0 - g.h_x, 1e-9);
    EXPECT_EQ(g.level_size(8192), 8192 * 8000);
}

TEST(GridStackTest, CapacityGuard) {
    EXPECT_THROW(build_grid_stack(1.0, Index{1} << 40, Index{1} << 40), capacity_error);
}

TEST(GridStackTest, NestingIdentityProperty) {
    const GridStack g = build_grid_stack(2.0, 4000, 64);
    std::mt19937 rng(7);
    for (int it = 0; it < 1000; ++it) {
        const Index k = std::uniform_int_distribution<Index>(1, 63)(rng);
        const Index i = std::uniform_int_distribution<Index>(0, g.level_size(k) - 1)(rng);
        const Index j = std::uniform_int_distribution<Index>(0, g.M - 1)(rng);
        const double lhs = g.point(k + 1, i + j);
        const double rhs = g.point(k, i) + g.xi(j);
        EXPECT_NEAR(lhs, rhs, 1e-11 * (1.0 + std::abs(lhs)));
    }
}

TEST(KernelTest, LambdaFromDefinition) {
    const GridStack g = build_grid_stack(2.0, 8, 1);
    const ConvolutionKernel k = build_kernel(0.25, 0.1, g);
    EXPECT_DOUBLE_EQ(k.lambda, 10.0);
}

TEST(KernelTest, MassMatchesErfIntegral) {
    const GridStack g = build_grid_stack(2.0, 4000, 1);
    const ConvolutionKernel k = build_kernel(0.5, 0.03125, g);
    double mass = 0.0;
    for (double v : k.p) mass += v;
    const double exact = std::erf(std::sqrt(k.lambda) * g.a_x);
    EXPECT_NEAR(mass, exact, 1e-12);
    EXPECT_NEAR(mass, 1.0, 1e-12);
}

TEST(KernelTest, MinimalShape) {
    const GridStack g = build_grid_stack(1.0, 1, 1);
    const ConvolutionKernel k = build_kernel(1.0, 1.0, g);
    EXPECT_EQ(k.p.size(), 2u);
    EXPECT_EQ(k.p_rev.size(), 2u);
}

TEST(KernelTest, SymmetryAndReversal) {
    const GridStack g = build_grid_stack(1.5, 37, 1);
    const ConvolutionKernel k = build_kernel(0.3, 0.05, g);
    const Index M = g.M;
    for (Index j = 1; j < M; ++j) {
        EXPECT_NEAR(k.p[static_cast<size_t>(j)], k.p[static_cast<size_t>(M - j)],
                    1e-12 * k.p[static_cast<size_t>(j)]);
    }
    for (Index j = 0; j < M; ++j)
        EXPECT_DOUBLE_EQ(k.p_rev[static_cast<size_t>(j)], k.p[static_cast<size_t>(M - 1 - j)]);
    for (double v : k.p) EXPECT_GE(v, 0.0);
}

TEST(KernelTest, RejectsBadArguments) {
    const GridStack g = build_grid_stack(1.0, 4, 1);
    EXPECT_THROW(build_kernel(0.0, 0.1, g), std::invalid_argument);
    EXPECT_THROW(build_kernel(1.0, 0.0, g), std::invalid_argument);
}
