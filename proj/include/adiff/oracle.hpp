#pragma once

#include <cstddef>
#include <vector>

#include "adiff/diffusion.hpp"
#include "adiff/estimators.hpp"
#include "adiff/protocol.hpp"
#include "adiff/rational.hpp"

namespace adiff {

/// One possible (vs_{t-1}, vs_t) at a fixed time, with its exact probability.
template <class S>
struct WeightedOutcome {
  VertexLabel vs_prev;
  VertexLabel vs_now;
  S probability;
};

/// Every distinct (vs_{t-1}, vs_t) pair reachable at time t >= 1, with
/// probabilities summing to one. Positions reached along different paths are
/// merged; no symmetry is folded away. S = Rational needs a protocol with
/// exact alpha. Throws BudgetExceeded when more than `cap` outcomes appear.
template <class S>
std::vector<WeightedOutcome<S>> enumerate_single(const Protocol& p, int t,
                                                 std::size_t cap = 10'000'000);

/// Exact P(estimator output == source) when one independent diffusion is
/// observed at each of `times`. The estimator's own tie-break and
/// virtual-source choices are averaged analytically. Throws BudgetExceeded
/// when the joint outcome count exceeds `cap`.
template <class S>
S exact_success(const EstimatorSpec& spec, const Protocol& p, const std::vector<int>& times,
                std::size_t cap = 10'000'000);

extern template std::vector<WeightedOutcome<double>> enumerate_single<double>(const Protocol&, int,
                                                                              std::size_t);
extern template std::vector<WeightedOutcome<Rational>> enumerate_single<Rational>(
    const Protocol&, int, std::size_t);
extern template double exact_success<double>(const EstimatorSpec&, const Protocol&,
                                             const std::vector<int>&, std::size_t);
extern template Rational exact_success<Rational>(const EstimatorSpec&, const Protocol&,
                                                 const std::vector<int>&, std::size_t);

}  // namespace adiff
