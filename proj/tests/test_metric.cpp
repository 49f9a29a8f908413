#include "abfix/metric.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace abfix;

namespace {

const std::vector<double> zero_one_two{0.0, 1.0, 2.0};

std::vector<Triple<double>> all_triples_012() {
    return enumerate_triples(std::span<const double>(zero_one_two));
}

// Brute-force oracle: the largest ratio over a full enumeration, written
// independently of the estimator's loop.
double brute_force_symmetric_constant(const std::vector<double>& pts) {
    double s = 1.0;
    for (double x : pts)
        for (double y : pts)
            for (double z : pts) {
                const double num = (x - y) * (x - y);
                const double den = (x - z) * (x - z) + (z - y) * (z - y);
                if (den > 0) s = std::max(s, num / den);
            }
    return s;
}

} // namespace

TEST(VerifyAxioms, AbsoluteValueIsAMetric) {
    const auto space = abs_space(interval_domain(0.0, 1.0));
    const auto rep = verify_axioms(space, {1.0, 1.0}, 42, 10000);
    EXPECT_TRUE(rep.passed);
    EXPECT_TRUE(rep.violations.empty());
    EXPECT_EQ(rep.triples_checked, 10000u);
}

TEST(VerifyAxioms, SquaredDistanceFailsTriangleAtWitness) {
    const auto space = abs_squared_space(interval_domain(-10.0, 10.0));
    const std::vector<Triple<double>> witness{{0.0, 2.0, 1.0}};
    const auto rep = verify_axioms(space, {1.0, 1.0}, std::span<const Triple<double>>(witness));
    ASSERT_FALSE(rep.passed);
    ASSERT_EQ(rep.violations.size(), 1u);
    const auto& v = rep.violations.front();
    EXPECT_EQ(v.axiom, Axiom::triangle);
    EXPECT_EQ(v.lhs, 4.0);
    EXPECT_EQ(v.rhs, 2.0);
    EXPECT_EQ(v.witness, (std::vector<double>{0.0, 2.0, 1.0}));
}

TEST(VerifyAxioms, SquaredDistancePassesAtTwoTwoOnExhaustiveGrid) {
    // Oracle: (a+b)^2 <= 2a^2 + 2b^2 plus every triple of a 50-point grid.
    std::vector<double> pts;
    for (int i = 0; i < 50; ++i) pts.push_back(-3.0 + 6.0 * i / 49.0);
    const auto triples = enumerate_triples(std::span<const double>(pts));
    ASSERT_EQ(triples.size(), 125000u);
    for (const auto& t : triples) {
        const double a = std::abs(t.x - t.z), b = std::abs(t.z - t.y);
        ASSERT_LE((a + b) * (a + b), 2 * a * a + 2 * b * b + 1e-12);
    }
    const auto space = abs_squared_space(point_domain(pts));
    EXPECT_TRUE(verify_axioms(space, {2.0, 2.0}, std::span<const Triple<double>>(triples)).passed);
    EXPECT_TRUE(verify_axioms(space, {2.0, 2.0}, 9, 10000).passed);
}

TEST(VerifyAxioms, WitnessesAreAppendedToSamples) {
    const auto space = abs_squared_space(interval_domain(0.0, 0.001));
    const std::vector<Triple<double>> w{{0.0, 2.0, 1.0}};
    const auto rep = verify_axioms(space, {1.0, 1.0}, 1, 10, std::span<const Triple<double>>(w));
    EXPECT_EQ(rep.triples_checked, 11u);
    EXPECT_FALSE(rep.passed);
}

TEST(VerifyAxioms, FlagsAsymmetryAndNonzeroSelfDistance) {
    MetricSpace<double> skew{"skew", interval_domain(0, 1),
                             [](const double& x, const double& y) { return x >= y ? x - y + 0.5 : y - x; },
                             {1, 1}};
    const std::vector<Triple<double>> t{{0.2, 0.7, 0.4}};
    const auto rep = verify_axioms(skew, {5, 5}, std::span<const Triple<double>>(t));
    EXPECT_FALSE(rep.passed);
    bool saw_identity = false, saw_symmetry = false;
    for (const auto& v : rep.violations) {
        saw_identity |= v.axiom == Axiom::identity;
        saw_symmetry |= v.axiom == Axiom::symmetry;
    }
    EXPECT_TRUE(saw_identity);
    EXPECT_TRUE(saw_symmetry);
}

TEST(VerifyAxioms, FlagsDistinctPointsAtZeroDistance) {
    MetricSpace<double> floor_dist{"floor", point_domain({0.1, 0.2}),
                                   [](const double& x, const double& y) {
                                       return std::abs(std::floor(x) - std::floor(y));
                                   },
                                   {1, 1}};
    const std::vector<Triple<double>> t{{0.1, 0.2, 0.1}};
    const auto rep = verify_axioms(floor_dist, {1, 1}, std::span<const Triple<double>>(t));
    ASSERT_FALSE(rep.passed);
    EXPECT_EQ(rep.violations.front().axiom, Axiom::indiscernibility);
}

TEST(VerifyAxioms, NegativeOrNonFiniteDistanceIsAnEvaluationError) {
    MetricSpace<double> neg{"neg", interval_domain(0, 1),
                            [](const double& x, const double& y) { return x - y; }, {1, 1}};
    const std::vector<Triple<double>> t{{0.0, 1.0, 0.5}};
    EXPECT_THROW(verify_axioms(neg, {1, 1}, std::span<const Triple<double>>(t)), EvaluationError);

    MetricSpace<double> nan_space{"nan", interval_domain(0, 1),
                                  [](const double&, const double&) { return std::nan(""); }, {1, 1}};
    EXPECT_THROW(verify_axioms(nan_space, {1, 1}, std::span<const Triple<double>>(t)), EvaluationError);
}

TEST(VerifyAxioms, EmptyDomainIsADomainError) {
    EXPECT_THROW(point_domain({}), DomainError);
    EXPECT_THROW(interval_domain(1.0, 0.0), DomainError);
    const auto space = abs_space(interval_domain(0, 1));
    EXPECT_THROW(verify_axioms(space, {1, 1}, 1, 0), DomainError);
    EXPECT_THROW(verify_axioms(space, {0.5, 1}, 1, 10), ContractError);
}

TEST(VerifyAxioms, GridFunctionSupMetricIsAMetric) {
    const auto space = sup_grid_space(UniformGrid(0, 1, 16), 3.0);
    EXPECT_TRUE(verify_axioms(space, {1, 1}, 5, 500).passed);
}

TEST(SymmetricConstant, MetricCaseIsOne) {
    const auto space = abs_space(interval_domain(0.0, 1.0));
    const auto triples = sample_triples(space.domain, 3, 10000);
    EXPECT_EQ(estimate_min_symmetric_constant(space, std::span<const Triple<double>>(triples)).value, 1.0);
}

TEST(SymmetricConstant, SquaredDistanceOnZeroOneTwoIsTwo) {
    EXPECT_EQ(brute_force_symmetric_constant(zero_one_two), 2.0);
    const auto space = abs_squared_space(point_domain(zero_one_two));
    const auto triples = all_triples_012();
    const auto est = estimate_min_symmetric_constant(space, std::span<const Triple<double>>(triples));
    EXPECT_EQ(est.value, 2.0);
    ASSERT_TRUE(est.attained_at.has_value());
    EXPECT_EQ(est.attained_at->x, 0.0);
    EXPECT_EQ(est.attained_at->y, 2.0);
    EXPECT_EQ(est.attained_at->z, 1.0);
}

TEST(SymmetricConstant, DegenerateTripleClampsToOne) {
    const auto space = abs_squared_space(interval_domain(0, 5));
    const std::vector<Triple<double>> t{{1.0, 4.0, 1.0}};
    EXPECT_EQ(estimate_min_symmetric_constant(space, std::span<const Triple<double>>(t)).value, 1.0);
}

TEST(MinBetaGivenAlpha, MatchesEnumerationOracle) {
    const auto space = abs_squared_space(point_domain(zero_one_two));
    const auto triples = all_triples_012();
    const std::span<const Triple<double>> ts(triples);
    EXPECT_EQ(estimate_min_beta_given_alpha(space, 3.0, ts).value, 1.0);
    EXPECT_EQ(estimate_min_beta_given_alpha(space, 1.0, ts).value, 3.0);

    const auto abs = abs_space(interval_domain(0, 1));
    const auto at = sample_triples(abs.domain, 4, 5000);
    EXPECT_EQ(estimate_min_beta_given_alpha(abs, 1.0, std::span<const Triple<double>>(at)).value, 1.0);
    EXPECT_THROW(estimate_min_beta_given_alpha(abs, 0.5, std::span<const Triple<double>>(at)), ContractError);
}

TEST(Frontier, DefaultAlphaGrid) {
    EXPECT_EQ(default_alpha_grid(), (std::vector<double>{1, 1.25, 1.5, 2, 2.5, 3, 4, 5}));
    const auto space = abs_squared_space(point_domain(zero_one_two));
    const auto triples = all_triples_012();
    const auto f = frontier(space, std::span<const Triple<double>>(triples));
    ASSERT_EQ(f.size(), 8u);
    EXPECT_EQ(f.front().beta, 3.0);   // alpha = 1
    EXPECT_EQ(f[3].beta, 2.0);        // alpha = 2
    EXPECT_EQ(f.back().beta, 1.0);    // alpha = 5
}

TEST(Classify, AbsoluteValueIsMetric) {
    const auto c = classify_space(abs_space(interval_domain(0, 1)), 8, 5000);
    EXPECT_EQ(c.label, SpaceClass::metric);
    EXPECT_EQ(c.certificate, (AlphaBetaParams{1, 1}));
}

TEST(Classify, SquaredDistanceIsBMetricWithTwo) {
    std::vector<double> pts;
    for (int i = 0; i <= 40; ++i) pts.push_back(i / 20.0);  // dense grid over [0, 2]
    const auto space = abs_squared_space(point_domain(pts));
    const auto triples = enumerate_triples(std::span<const double>(pts));
    const std::span<const Triple<double>> ts(triples);
    EXPECT_NEAR(estimate_min_symmetric_constant(space, ts).value, 2.0, 1e-12);
    const auto c = classify_space(space, ts);
    EXPECT_EQ(c.label, SpaceClass::b_metric);
    EXPECT_NEAR(c.symmetric_constant, 2.0, 1e-12);
    // Strictly above two also passes, matching the claimed feasibility for alpha, beta > 2.
    EXPECT_TRUE(verify_axioms(space, {2.5, 2.5}, ts).passed);
}

TEST(Classify, DegenerateDistanceIsUnknown) {
    MetricSpace<double> zero{"zero", interval_domain(0, 1), [](const double&, const double&) { return 0.0; },
                             {1, 1}};
    EXPECT_EQ(classify_space(zero, 1, 100).label, SpaceClass::unknown);
}

TEST(Sampling, SameSeedSameTriples) {
    const auto d = interval_domain(-1, 1);
    const auto a = sample_triples(d, 99, 100);
    const auto b = sample_triples(d, 99, 100);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].x, b[i].x);
        EXPECT_EQ(a[i].y, b[i].y);
        EXPECT_EQ(a[i].z, b[i].z);
    }
}
