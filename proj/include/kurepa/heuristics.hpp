#pragma once

// Counterexample heuristics. If r_p is uniform mod p, a fixed residue appears at p with
// probability 1/p. Leading terms of Mertens' theorems give
//
//     sum_{a<=p<=b} 1/p       ~ ln(ln b / ln a)
//     prod_{a<=p<=b} (1-1/p)  ~ ln a / ln b
//
// The O(1/ln x) corrections, and the constants below, are not part of the estimates.

#include <numbers>
#include <optional>

namespace kurepa {

inline constexpr double kMertensConstant = 0.2614972128476428;  // M in sum 1/p = ln ln x + M + ...
inline constexpr double kEulerGamma = std::numbers::egamma_v<double>;

enum class EstimateKind { expected_counterexamples, expected_small_residues, prob_none };

struct HeuristicEstimate {
    double a = 0.0;
    double b = 0.0;
    std::optional<double> l;
    double value = 0.0;
    EstimateKind kind = EstimateKind::expected_counterexamples;
};

// ln(ln b / ln a). Requires e < a <= b.
double expected_counterexamples(double a, double b);
// (2l - 1) ln(ln b / ln a): primes with |r_p| < l. Requires e < a <= b, l >= 1.
double expected_small_residues(double a, double b, double l);
// ln a / ln b. Requires e < a <= b.
double prob_no_counterexample(double a, double b);
// The b for which prob_no_counterexample(a, b) == prob: a^(1/prob). Requires 0 < prob <= 1.
double bound_for_probability(double a, double prob);

HeuristicEstimate estimate(EstimateKind kind, double a, double b, std::optional<double> l = std::nullopt);

} // namespace kurepa
