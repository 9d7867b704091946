#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "adiff/closed_form.hpp"
#include "adiff/estimators.hpp"
#include "adiff/protocol.hpp"

namespace adiff {

/// Config validation failure; what() lists every violation, one per line.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct ProtocolSpec {
  std::string name = "uniform";
  std::optional<double> gamma;
  std::optional<double> alpha;
  std::optional<std::string> path;
};

/// Builds the protocol named by `spec` ("uniform", "perfect", "local",
/// "constant" or "table").
Protocol make_protocol(int d, const ProtocolSpec& spec);

struct TargetSpec {
  /// Registry formula, or empty when `fixed` is given.
  std::string formula;
  nlohmann::json args = nlohmann::json::object();
  std::optional<Target> fixed;
};

struct EstimatorRun {
  EstimatorSpec spec;
  std::string label;
  std::vector<TargetSpec> targets;
};

struct ExperimentConfig {
  int d = 3;
  ProtocolSpec protocol;
  /// Observation time of each of the k diffusions.
  std::vector<int> times;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  /// 0 means "pick automatically".
  unsigned threads = 0;
  std::vector<EstimatorRun> estimators;

  int k() const noexcept { return static_cast<int>(times.size()); }
};

/// Parses and validates; throws ConfigError with all problems found.
///
/// Schema:
///   {"d": 3, "protocol": {"name": "local", "gamma": 0.5}, "times": [12, 12],
///    "k": 2, "trials": 100000, "seed": 1, "threads": 4,
///    "estimators": [{"method": "two-path", "label": "...", "search_depth": 3,
///                    "targets": [{"formula": "two-path-lower", "args": {...}},
///                                {"kind": "exact", "value": 0.25}]}]}
/// "times" may hold a single value repeated k times. Target args default to
/// d, t1 = times[0], t2 = times[1], t = times[0], k and the protocol's gamma.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);

enum class Verdict { pass, fail, informational };
std::string verdict_name(Verdict v);

struct TargetCheck {
  Target target;
  double sigma = 0.0;
  Verdict verdict = Verdict::informational;
};

struct EstimatorReport {
  std::string label;
  Method method = Method::generic_mle;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  /// Trials where the estimator refused its inputs.
  std::uint64_t errors = 0;
  double frequency = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<TargetCheck> checks;
  Verdict verdict = Verdict::informational;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<EstimatorReport> estimators;
  Verdict verdict = Verdict::informational;
  double wall_seconds = 0.0;

  bool failed() const noexcept { return verdict == Verdict::fail; }
};

/// 95% Wilson score interval.
std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials);

/// Exact targets: |f - v| <= 3 sqrt(v(1-v)/n). Bounds use sqrt(f(1-f)/n).
TargetCheck check_target(const Target& target, std::uint64_t successes, std::uint64_t trials);

/// Runs every trial. Trial i simulates diffusion j from
/// derive_seed(seed, i, j) and runs estimator e with derive_seed(seed, i, k + e).
/// Thread count: config.threads, else hardware concurrency, capped by ADL_THREADS.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Report body; wall time is kept under its own key so bodies can be diffed.
nlohmann::json to_json(const ExperimentReport& r);
void write_csv_summary(const ExperimentReport& r, std::ostream& out);

}  // namespace adiff
