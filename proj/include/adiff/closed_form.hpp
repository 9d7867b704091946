#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "adiff/rational.hpp"

namespace adiff {

enum class TargetKind { exact, lower_bound, upper_bound };

std::string kind_name(TargetKind k);

/// A number a Monte Carlo frequency (or DP quantity) is checked against.
struct Target {
  TargetKind kind = TargetKind::exact;
  /// Value after clipping probabilities to [0, 1].
  double value = 0.0;
  /// Value before clipping.
  double raw = 0.0;
  /// The unclipped bound left [0, 1], so it carries no information.
  bool vacuous = false;
  bool probability = true;
  /// Short formula description for reports.
  std::string formula;
};

nlohmann::json to_json(const Target& t);

/// Two-snapshot path estimator: P(correct) >= (d-1)/d * 2/min(t1, t2).
Target two_path_lower(int d, int t1, int t2);
/// Any two-snapshot estimator against the uniform protocol:
/// P(correct) <= (d-1)/d * 7/min(t1, t2).
Target two_snapshot_upper(int d, int t1, int t2);

/// Pieces of the even-even MLE success probability for the uniform protocol:
///   P = (d-1)/d * separated + 1/d * shared
struct EvenEvenParts {
  Rational separated;  ///< (2 t1 + 2 t2 - 4)/(t1 t2)
  Rational shared;     ///< 4/(t1 t2) (1/d + 1/(d-1))
  Rational total;
};
EvenEvenParts even_even_mle_parts(int d, int t1, int t2);
Target even_even_mle_exact(int d, int t1, int t2);

/// (d-1)/d (2/te + 4/(to+1) - 8/(te(to+1)))
///   + 1/d * 4/(te(to+1)) (1/d + 1/(d-1) + 6/((to-1)(d-1)))
Rational even_odd_mle_rational(int d, int t_even, int t_odd);
Target even_odd_mle_exact(int d, int t_even, int t_odd);
/// (d-1)/d * 6/min(t1, t2), the looser bound the exact value sits under.
Target even_odd_mle_upper(int d, int t_even, int t_odd);

/// (d-1)/d * (20/3)/(min(t1, t2) + 1).
Target odd_odd_mle_upper(int d, int t1, int t2);

/// Three snapshots: P(correct) >= (d-1)(d-2)/d^2.
Target three_snapshot_lower(int d);
/// k snapshots: P(correct) >= 1 - d exp(-(d-2)^2 k/(2 d^2)).
Target k_snapshot_lower(int d, int k);

/// E[R_t] <= (1-gamma) t/2 + log(C t)/log(d-1) + 2 under C/N_t^gamma obfuscation.
Target radius_upper(int d, int t, double gamma, double C);

/// Local-spreading protocol with parameter gamma at even t:
/// first: E[R_t] (exact t/2 - 1 while t <= 2/gamma, else lower bound (1-gamma) t/2);
/// second: single-MLE success <= 2(d-1)/N_t^gamma.
std::pair<Target, Target> local_spreading_targets(int d, int t, double gamma);

/// N_t = d((d-1)^{t/2} - 1)/(d-2) + 1 for even t.
Integer ball_count(int d, int t);

/// Perfect-obfuscation single MLE: 1/(N_t - 1).
Target perfect_single_mle_exact(int d, int t);

/// sum_{j<=s, l<=t} 1/(1 + min(j-1, t-l) + min(l-1, s-j)), exactly.
Rational path_sum(int s, int t);

/// Names accepted by evaluate_target.
std::vector<std::string> target_formulas();

/// Looks up `formula` and evaluates it with arguments from `args`
/// (keys d, t1, t2, t, k, gamma, C as the formula needs).
Target evaluate_target(const std::string& formula, const nlohmann::json& args);

}  // namespace adiff
