#include "abfix/grid.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace abfix;

TEST(UniformGrid, EndpointsAreExact) {
    const UniformGrid g(-0.5, 0.5, 1000);
    EXPECT_EQ(g.size(), 1001u);
    EXPECT_EQ(g.node(0), -0.5);
    EXPECT_EQ(g.node(1000), 0.5);
    EXPECT_DOUBLE_EQ(g.spacing(), 1e-3);
}

TEST(UniformGrid, RejectsEmptyInterval) {
    EXPECT_THROW(UniformGrid(1.0, 1.0, 4), DomainError);
    EXPECT_THROW(UniformGrid(0.0, 1.0, 0), DomainError);
}

TEST(GridFunction, SizeMustMatchGrid) {
    EXPECT_THROW(GridFunction(UniformGrid(0, 1, 4), {1.0, 2.0}), DomainError);
}

TEST(GridFunction, SupDistanceIsMaxAbsoluteNodeDifference) {
    const UniformGrid g(0, 1, 4);
    const GridFunction u(g, {0, 1, 2, 3, 4});
    const GridFunction v(g, {0, 1.5, 2, 1, 4});
    EXPECT_EQ(sup_distance(u, v), 2.0);
    EXPECT_EQ(sup_distance(v, u), 2.0);
    EXPECT_EQ(sup_distance(u, u), 0.0);
}

TEST(GridFunction, SupDistanceRejectsMismatchedGrids) {
    const auto u = GridFunction::constant(UniformGrid(0, 1, 4), 0.0);
    const auto v = GridFunction::constant(UniformGrid(0, 2, 4), 0.0);
    EXPECT_THROW(sup_distance(u, v), DomainError);
}

TEST(Quadrature, WeightsSumToIntervalLength) {
    for (auto kind : {QuadratureKind::trapezoid, QuadratureKind::simpson}) {
        const UniformGrid g(-1.0, 2.5, 100);
        const auto q = make_quadrature(kind, g);
        EXPECT_NEAR(weight_sum(q), 3.5, 1e-12 * 3.5) << to_string(kind);
        for (double w : q.weights) EXPECT_GT(w, 0.0);
    }
}

TEST(Quadrature, SimpsonNeedsEvenIntervals) {
    EXPECT_THROW(make_quadrature(QuadratureKind::simpson, UniformGrid(0, 1, 7)), DomainError);
}

TEST(Quadrature, TrapezoidExactOnLinearSimpsonOnCubic) {
    const UniformGrid g(0.0, 2.0, 10);
    auto integrate = [&](QuadratureKind k, auto f) {
        const auto q = make_quadrature(k, g);
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) s += q.weights[i] * f(g.node(i));
        return s;
    };
    EXPECT_NEAR(integrate(QuadratureKind::trapezoid, [](double x) { return 3 * x + 1; }), 8.0, 1e-13);
    // int_0^2 x^3 dx = 4
    EXPECT_NEAR(integrate(QuadratureKind::simpson, [](double x) { return x * x * x; }), 4.0, 1e-13);
}
