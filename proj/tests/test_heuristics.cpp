#include <cmath>

#include <gtest/gtest.h>

#include "kurepa/errors.hpp"
#include "kurepa/heuristics.hpp"

using namespace kurepa;

TEST(ExpectedCounterexamples, Examples) {
    for (double t : {2.0, 10.0, 30.0}) EXPECT_NEAR(expected_counterexamples(std::exp2(t), std::exp2(2 * t)), std::log(2.0), 1e-12);
    EXPECT_NEAR(expected_counterexamples(1.44e8, std::exp2(34)), std::log(34 * std::log(2.0) / std::log(1.44e8)), 1e-15);
    EXPECT_NEAR(expected_counterexamples(1.44e8, std::exp2(34)), 0.2268, 1e-4);
    EXPECT_EQ(expected_counterexamples(100.0, 100.0), 0.0);
    EXPECT_THROW(expected_counterexamples(2.0, 100.0), ArgumentError);
    EXPECT_THROW(expected_counterexamples(100.0, 50.0), ArgumentError);
}

TEST(ExpectedSmallResidues, Examples) {
    const double a = std::exp2(30), b = std::exp2(34);
    EXPECT_NEAR(expected_small_residues(a, b, 100), 24.90, 0.01);
    EXPECT_NEAR(expected_small_residues(a, b, 100), 199 * std::log(17.0 / 15.0), 1e-12);
    EXPECT_EQ(std::llround(expected_small_residues(a, b, 100)), 25);
    EXPECT_EQ(std::llround(expected_small_residues(a, b, 10000)), 2503);
    EXPECT_NEAR(expected_small_residues(a, b, 10000), 19999 * std::log(17.0 / 15.0), 1e-9);
    EXPECT_EQ(expected_small_residues(a, b, 1), expected_counterexamples(a, b));
    EXPECT_THROW(expected_small_residues(a, b, 0.5), ArgumentError);
}

TEST(ProbNoCounterexample, Examples) {
    for (double t : {2.0, 17.0, 34.0}) EXPECT_NEAR(prob_no_counterexample(std::exp2(t), std::exp2(2 * t)), 0.5, 1e-12);
    EXPECT_NEAR(1.0 - prob_no_counterexample(1.44e8, std::exp2(34)), 0.20, 0.01);
    EXPECT_NEAR(prob_no_counterexample(std::exp2(34), std::exp2(35)), 34.0 / 35.0, 1e-12);
    EXPECT_NEAR(1.0 - prob_no_counterexample(std::exp2(34), std::exp2(35)), 0.03, 0.005);
}

TEST(Heuristics, Monotonicity) {
    double prev = 1.0;
    for (double b = 1e3; b < 1e15; b *= 3.7) {
        const double v = prob_no_counterexample(1e3, b);
        EXPECT_LE(v, prev);
        prev = v;
    }
    prev = 0.0;
    for (double a = 10; a < 1e9; a *= 2.3) {
        const double v = prob_no_counterexample(a, 1e9);
        EXPECT_GE(v, prev);
        prev = v;
    }
}

TEST(Heuristics, LogRatioAdditivity) {
    for (double a : {10.0, 1e4, 1.44e8})
        for (double f : {1.5, 10.0, 1e3}) {
            const double b = a * f, c = b * f * f;
            EXPECT_NEAR(expected_counterexamples(a, c), expected_counterexamples(a, b) + expected_counterexamples(b, c),
                        1e-12);
        }
}

TEST(Heuristics, ProbabilityIsExpOfExpectation) {
    for (double a : {10.0, 1e6})
        for (double b : {a, a * 7, a * a})
            EXPECT_NEAR(prob_no_counterexample(a, b), std::exp(-expected_counterexamples(a, b)), 1e-14);
}

TEST(Heuristics, HalfChanceBoundIsSquare) {
    EXPECT_NEAR(bound_for_probability(std::exp2(34), 0.5) / std::exp2(68), 1.0, 1e-12);
    EXPECT_NEAR(prob_no_counterexample(std::exp2(34), std::exp2(68)), 0.5, 1e-12);
}

TEST(Heuristics, EstimateRecord) {
    const HeuristicEstimate e = estimate(EstimateKind::expected_small_residues, 1e6, 1e7, 10.0);
    EXPECT_EQ(e.kind, EstimateKind::expected_small_residues);
    EXPECT_EQ(e.value, expected_small_residues(1e6, 1e7, 10.0));
    EXPECT_THROW(estimate(EstimateKind::expected_small_residues, 1e6, 1e7), ArgumentError);
    const HeuristicEstimate p = estimate(EstimateKind::prob_none, 1e6, 1e7);
    EXPECT_GT(p.value, 0.0);
    EXPECT_LE(p.value, 1.0);
}
