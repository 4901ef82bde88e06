#include "kurepa/heuristics.hpp"

#include <cmath>
#include <string>

#include "kurepa/errors.hpp"

namespace kurepa {

namespace {

void check_interval(double a, double b) {
    if (!(a > std::numbers::e) || !(b >= a) || !std::isfinite(b))
        throw ArgumentError("heuristic interval requires e < a <= b, got a=" + std::to_string(a) +
                            " b=" + std::to_string(b));
}

} // namespace

double expected_counterexamples(double a, double b) {
    check_interval(a, b);
    return std::log(std::log(b) / std::log(a));
}

double expected_small_residues(double a, double b, double l) {
    if (!(l >= 1.0)) throw ArgumentError("threshold l must be at least 1");
    return (2.0 * l - 1.0) * expected_counterexamples(a, b);
}

double prob_no_counterexample(double a, double b) {
    check_interval(a, b);
    return std::log(a) / std::log(b);
}

double bound_for_probability(double a, double prob) {
    check_interval(a, a);
    if (!(prob > 0.0 && prob <= 1.0)) throw ArgumentError("probability must lie in (0, 1]");
    return std::exp(std::log(a) / prob);
}

HeuristicEstimate estimate(EstimateKind kind, double a, double b, std::optional<double> l) {
    HeuristicEstimate e{a, b, l, 0.0, kind};
    switch (kind) {
    case EstimateKind::expected_counterexamples: e.value = expected_counterexamples(a, b); break;
    case EstimateKind::expected_small_residues:
        if (!l) throw ArgumentError("expected_small_residues needs a threshold l");
        e.value = expected_small_residues(a, b, *l);
        break;
    case EstimateKind::prob_none: e.value = prob_no_counterexample(a, b); break;
    }
    return e;
}

} // namespace kurepa
