#include <cstdlib>
#include <sstream>

#include "doctest.h"

#include "adiff/experiments.hpp"

using namespace adiff;

namespace {

nlohmann::json base_config() {
  return nlohmann::json::parse(R"({
    "d": 3,
    "protocol": {"name": "uniform"},
    "times": [8, 8],
    "trials": 2000,
    "seed": 42,
    "estimators": [
      {"method": "two-path", "targets": [{"formula": "two-path-lower"}]},
      {"method": "generic-mle", "label": "mle", "targets": [{"formula": "even-even-mle"}]},
      {"method": "mle-cases", "targets": [{"kind": "exact", "value": 0.3}]}
    ]
  })");
}

}  // namespace

TEST_CASE("wilson interval") {
  const auto [lo, hi] = wilson_interval(50, 100);
  CHECK(lo == doctest::Approx(0.40383).epsilon(1e-4));
  CHECK(hi == doctest::Approx(0.59617).epsilon(1e-4));
  const auto [lo0, hi0] = wilson_interval(0, 10);
  CHECK(lo0 == 0.0);
  CHECK(hi0 == doctest::Approx(0.27753).epsilon(1e-4));
}

TEST_CASE("verdict bands") {
  Target exact;
  exact.kind = TargetKind::exact;
  exact.value = 0.5;
  // sigma = 0.05 at n = 100
  CHECK(check_target(exact, 64, 100).verdict == Verdict::pass);
  CHECK(check_target(exact, 66, 100).verdict == Verdict::fail);
  CHECK(check_target(exact, 64, 100).sigma == doctest::Approx(0.05));

  Target lower;
  lower.kind = TargetKind::lower_bound;
  lower.value = 0.5;
  // empirical sigma at f = 0.4 is sqrt(0.24/100) ~ 0.049
  CHECK(check_target(lower, 40, 100).verdict == Verdict::pass);
  CHECK(check_target(lower, 30, 100).verdict == Verdict::fail);
  CHECK(check_target(lower, 40, 100).sigma == doctest::Approx(std::sqrt(0.0024)));

  Target upper;
  upper.kind = TargetKind::upper_bound;
  upper.value = 0.2;
  CHECK(check_target(upper, 30, 100).verdict == Verdict::pass);
  CHECK(check_target(upper, 40, 100).verdict == Verdict::fail);

  upper.vacuous = true;
  CHECK(check_target(upper, 40, 100).verdict == Verdict::informational);
}

TEST_CASE("config validation reports every problem") {
  auto j = base_config();
  j["d"] = 2;
  j["trials"] = 0;
  j["protocol"] = {{"name", "local"}};
  j["estimators"][0]["method"] = "nonsense";
  j["estimators"][1]["targets"][0]["formula"] = "not-a-formula";
  try {
    parse_config(j);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.problems().size() >= 5);
    const std::string what = e.what();
    CHECK(what.find("\"d\"") != std::string::npos);
    CHECK(what.find("trials") != std::string::npos);
    CHECK(what.find("gamma") != std::string::npos);
    CHECK(what.find("nonsense") != std::string::npos);
    CHECK(what.find("not-a-formula") != std::string::npos);
  }
}

TEST_CASE("config validation checks estimator preconditions") {
  auto j = base_config();
  j["times"] = {2, 3};
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = base_config();
  j["estimators"] = {{{"method", "three-intersection"}}};
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = base_config();
  j["protocol"] = {{"name", "perfect"}};
  CHECK_THROWS_AS(parse_config(j), ConfigError);
}

TEST_CASE("times expand to k copies") {
  auto j = base_config();
  j["times"] = {10};
  j["k"] = 4;
  j["estimators"] = {{{"method", "k-subtree"}, {"targets", {{{"formula", "k-snapshot-lower"}}}}}};
  const auto c = parse_config(j);
  CHECK(c.times == std::vector<int>{10, 10, 10, 10});
  CHECK(c.k() == 4);
}

TEST_CASE("single trial smoke run") {
  auto j = base_config();
  j["trials"] = 1;
  const auto r = run_experiment(parse_config(j));
  REQUIRE(r.estimators.size() == 3);
  for (const auto& e : r.estimators) CHECK(e.trials == 1);
}

TEST_CASE("report body is independent of the thread count") {
  auto j = base_config();
  j["threads"] = 1;
  const auto one = to_json(run_experiment(parse_config(j)));
  j["threads"] = 4;
  const auto four = to_json(run_experiment(parse_config(j)));
  CHECK(one.at("report").dump() == four.at("report").dump());
  CHECK(one.contains("wall_seconds"));
}

TEST_CASE("estimates agree with their targets") {
  auto j = base_config();
  j["trials"] = 20000;
  j["estimators"].erase(2);
  const auto r = run_experiment(parse_config(j));
  CHECK_FALSE(r.failed());
  CHECK(r.estimators[1].label == "mle");
  CHECK(r.estimators[1].checks[0].target.value == doctest::Approx(even_even_mle_exact(3, 8, 8).value));
  CHECK(r.estimators[1].ci_low <= r.estimators[1].frequency);
  CHECK(r.estimators[1].frequency <= r.estimators[1].ci_high);
}

TEST_CASE("a wrong target fails the run") {
  auto j = base_config();
  j["estimators"] = {{{"method", "generic-mle"}, {"targets", {{{"kind", "exact"}, {"value", 0.9}}}}}};
  const auto r = run_experiment(parse_config(j));
  CHECK(r.failed());
  CHECK(r.estimators[0].verdict == Verdict::fail);
}

TEST_CASE("estimator precondition failures are counted") {
  ExperimentConfig c;
  c.d = 3;
  c.times = {2, 2};
  c.trials = 50;
  c.estimators.push_back({EstimatorSpec{Method::mle_cases, 3}, "cases", {}});
  const auto r = run_experiment(c);
  CHECK(r.estimators[0].errors == 50);
  CHECK(r.estimators[0].successes == 0);
  CHECK(r.failed());
}

TEST_CASE("csv summary") {
  auto j = base_config();
  j["trials"] = 10;
  std::ostringstream out;
  write_csv_summary(run_experiment(parse_config(j)), out);
  const auto text = out.str();
  CHECK(text.rfind("label,method,trials,successes,errors", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}
