#include "pathlr/expr.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace pathlr;

TEST(ExpressionTest, PrecedenceAndAssociativity) {
    EXPECT_DOUBLE_EQ(Expression::parse("1+2*3")(0.0), 7.0);
    EXPECT_DOUBLE_EQ(Expression::parse("(1+2)*3")(0.0), 9.0);
    EXPECT_DOUBLE_EQ(Expression::parse("2^3^2")(0.0), 512.0);  // right-associative
    EXPECT_DOUBLE_EQ(Expression::parse("-2^2")(0.0), -4.0);
    EXPECT_DOUBLE_EQ(Expression::parse("2*-3")(0.0), -6.0);
    EXPECT_DOUBLE_EQ(Expression::parse("10-4-3")(0.0), 3.0);
    EXPECT_DOUBLE_EQ(Expression::parse("8/4/2")(0.0), 1.0);
}

TEST(ExpressionTest, VariablesAndFunctions) {
    const Expression e = Expression::parse("x + 2*t");
    EXPECT_DOUBLE_EQ(e(1.0, 2.0), 5.0);
    EXPECT_NEAR(Expression::parse("sin(pi/2)")(0.0), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(Expression::parse("abs(-3.5)")(0.0), 3.5);
    EXPECT_NEAR(Expression::parse("sqrt(2)")(0.0), std::sqrt(2.0), 1e-15);
    EXPECT_DOUBLE_EQ(Expression::parse("pow(2, 10)")(0.0), 1024.0);
    EXPECT_DOUBLE_EQ(Expression::parse("exp(0)")(0.0), 1.0);
    EXPECT_DOUBLE_EQ(Expression::parse("min(3, max(1, 2))")(0.0), 2.0);
    EXPECT_NEAR(Expression::parse("tanh(0.5)")(0.0), std::tanh(0.5), 1e-15);
}

TEST(ExpressionTest, ReproducesCauchyPotential) {
    const Expression V =
        Expression::parse("-1/(t+1) + 2*0.5*(3*x^2 - 1)/(x^2 + 1)^2");
    for (double x : {-1.5, 0.0, 0.8}) {
        for (double t : {0.0, 0.5}) {
            const double d = x * x + 1.0;
            const double expected = -1.0 / (t + 1.0) + (3.0 * x * x - 1.0) / (d * d);
            EXPECT_NEAR(V(x, t), expected, 1e-14);
        }
    }
}

TEST(ExpressionTest, WhitespaceTolerant) {
    EXPECT_DOUBLE_EQ(Expression::parse("  1 +  2 * ( 3 - 1 ) ")(0.0), 5.0);
}

TEST(ExpressionTest, ErrorsCarryPosition) {
    EXPECT_THROW(Expression::parse("2+"), expr_error);
    EXPECT_THROW(Expression::parse("sin 3"), expr_error);
    EXPECT_THROW(Expression::parse("foo(2)"), expr_error);
    EXPECT_THROW(Expression::parse("(1+2"), expr_error);
    EXPECT_THROW(Expression::parse("1 2"), expr_error);
    EXPECT_THROW(Expression::parse("pow(1)"), expr_error);
    try {
        Expression::parse("1 + unknown_name");
        FAIL();
    } catch (const expr_error& e) {
        EXPECT_EQ(e.position, 4u);
    }
}
