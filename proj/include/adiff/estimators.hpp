#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "adiff/candidates.hpp"
#include "adiff/diffusion.hpp"
#include "adiff/protocol.hpp"
#include "adiff/rng.hpp"

namespace adiff {

enum class Method { single_mle, two_path, three_intersection, k_subtree, generic_mle, mle_cases };

/// "single-mle", "two-path", "three-intersection", "k-subtree", "generic-mle", "mle-cases".
std::string method_name(Method m);
/// Inverse of method_name; throws std::invalid_argument listing valid names.
Method parse_method(const std::string& name);

struct EstimatorSpec {
  Method method = Method::generic_mle;
  /// Fringe depth around the Steiner tree for generic-mle.
  int search_depth = 3;
};

/// What the likelihood-based estimators need besides snapshots.
struct ModelView {
  const Protocol* protocol = nullptr;
  const HopDistribution* hop = nullptr;
};

struct Estimate {
  Method method = Method::generic_mle;
  CandidateSet candidates;
  VertexLabel chosen;
  nlohmann::json diagnostics = nlohmann::json::object();
};

nlohmann::json to_json(const Estimate& e);

/// Candidate set plus diagnostics, before the uniform tie-break.
struct Ranked {
  CandidateSet candidates;
  nlohmann::json diagnostics = nlohmann::json::object();
};

/// Per-snapshot log-likelihood of a source at distance X from the virtual
/// sources, indexed by X = 0..radius. X = 0 is -inf (virtual sources are
/// excluded), as is any X with zero probability.
std::vector<double> log_likelihood_by_distance(const Snapshot& s, const ModelView& model);

/// P(single MLE picks the source) at time t, integrated over snapshots:
///   even t: max_h p(t,h) / (d (d-1)^{h-1})
///   odd t:  max_h p a / (d (d-1)^{h-1}) + max_h p (1-a) / (2 (d-1)^h),
/// with p, a taken at (t-1, h).
double single_mle_success_probability(const ModelView& model, int t);

Ranked single_mle_candidates(const Snapshot& s, const ModelView& model);
Ranked two_path_candidates(const Snapshot& s1, const Snapshot& s2);
/// `picks` holds one chosen virtual source per snapshot.
Ranked three_intersection_candidates(const TreeContext& ctx, std::span<const VertexLabel> picks);
Ranked k_subtree_candidates(const TreeContext& ctx, std::span<const VertexLabel> picks);
Ranked generic_mle_candidates(std::span<const Snapshot> snaps, const ModelView& model,
                              int search_depth);
/// Case analysis for two snapshots of the uniform protocol (even t >= 4,
/// odd t >= 5). Diagnostics carry the case tag.
Ranked uniform_mle_cases(const Snapshot& s1, const Snapshot& s2);

/// Snapshots an estimator reads: 1, 2, 3, all, all, 2.
std::size_t snapshots_used(Method m, std::size_t available);

/// Every outcome of the estimator's internal randomness (the choice of one
/// virtual source per non-ball snapshot), each equally likely. Estimators
/// without such choices return one entry. Throws BudgetExceeded above `cap`.
std::vector<Ranked> candidate_law(const EstimatorSpec& spec, std::span<const Snapshot> snaps,
                                  const ModelView& model, std::size_t cap = 1u << 16);

/// Runs the estimator and breaks ties uniformly with `rng`.
Estimate run_estimator(const EstimatorSpec& spec, std::span<const Snapshot> snaps,
                       const ModelView& model, Rng& rng);

}  // namespace adiff
