#include "adiff/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <thread>

#include "adiff/diffusion.hpp"
#include "adiff/errors.hpp"
#include "adiff/rng.hpp"

namespace adiff {
namespace {

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out = "invalid experiment config:";
  for (const auto& l : lines) out += "\n  - " + l;
  return out;
}

bool is_likelihood(Method m) {
  return m == Method::single_mle || m == Method::generic_mle || m == Method::mle_cases;
}

std::size_t min_snapshots(Method m) {
  switch (m) {
    case Method::two_path:
    case Method::mle_cases: return 2;
    case Method::three_intersection: return 3;
    default: return 1;
  }
}

unsigned pick_threads(unsigned requested) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("ADL_THREADS")) {
    const long c = std::strtol(cap, nullptr, 10);
    if (c >= 1) n = std::min(n, static_cast<unsigned>(c));
  }
  return std::max(1u, n);
}

nlohmann::json default_target_args(const ExperimentConfig& c) {
  nlohmann::json a = {{"d", c.d}, {"k", c.k()}};
  if (!c.times.empty()) {
    a["t"] = c.times[0];
    a["t1"] = c.times[0];
    a["t2"] = c.times.size() > 1 ? c.times[1] : c.times[0];
  }
  if (c.protocol.gamma) a["gamma"] = *c.protocol.gamma;
  return a;
}

Target resolve(const TargetSpec& spec, const ExperimentConfig& c) {
  if (spec.fixed) return *spec.fixed;
  nlohmann::json args = default_target_args(c);
  for (const auto& [key, value] : spec.args.items()) args[key] = value;
  return evaluate_target(spec.formula, args);
}

std::optional<TargetKind> parse_kind(const std::string& s) {
  if (s == "exact") return TargetKind::exact;
  if (s == "lower_bound") return TargetKind::lower_bound;
  if (s == "upper_bound") return TargetKind::upper_bound;
  return std::nullopt;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument(join_lines(problems)), problems_(std::move(problems)) {}

Protocol make_protocol(int d, const ProtocolSpec& spec) {
  if (spec.name == "uniform") return Protocol::uniform(d);
  if (spec.name == "perfect") return Protocol::perfect(d);
  if (spec.name == "local") {
    if (!spec.gamma) throw std::invalid_argument("protocol \"local\" needs gamma");
    return Protocol::local_spreading(d, *spec.gamma);
  }
  if (spec.name == "constant") {
    if (!spec.alpha) throw std::invalid_argument("protocol \"constant\" needs alpha");
    return Protocol::constant(d, *spec.alpha);
  }
  if (spec.name == "table") {
    if (!spec.path) throw std::invalid_argument("protocol \"table\" needs path");
    return Protocol::from_table_file(d, *spec.path);
  }
  throw std::invalid_argument("unknown protocol \"" + spec.name +
                              "\"; expected uniform, perfect, local, constant or table");
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  std::vector<std::string> problems;
  ExperimentConfig c;
  if (!j.is_object()) throw ConfigError({"config must be a JSON object"});

  auto get_int = [&](const char* key, auto& out, long long lo, bool required) {
    if (!j.contains(key)) {
      if (required) problems.push_back(std::string("missing \"") + key + "\"");
      return;
    }
    const auto& v = j.at(key);
    if (!v.is_number_integer()) {
      problems.push_back(std::string("\"") + key + "\" must be an integer");
      return;
    }
    if (v.get<long long>() < lo) {
      problems.push_back(std::string("\"") + key + "\" must be >= " + std::to_string(lo));
      return;
    }
    out = v.get<std::remove_reference_t<decltype(out)>>();
  };

  get_int("d", c.d, 3, true);
  get_int("trials", c.trials, 1, true);
  get_int("seed", c.seed, 0, false);
  get_int("threads", c.threads, 0, false);

  if (!j.contains("protocol") || !j.at("protocol").is_object()) {
    problems.push_back("missing \"protocol\" object");
  } else {
    const auto& p = j.at("protocol");
    if (!p.contains("name") || !p.at("name").is_string()) {
      problems.push_back("protocol needs a string \"name\"");
    } else {
      c.protocol.name = p.at("name").get<std::string>();
      const auto& n = c.protocol.name;
      if (n != "uniform" && n != "perfect" && n != "local" && n != "constant" && n != "table") {
        problems.push_back("unknown protocol \"" + n + "\"");
      }
      if (p.contains("gamma")) c.protocol.gamma = p.at("gamma").get<double>();
      if (p.contains("alpha")) c.protocol.alpha = p.at("alpha").get<double>();
      if (p.contains("path")) c.protocol.path = p.at("path").get<std::string>();
      if (n == "local" && !(c.protocol.gamma && *c.protocol.gamma > 0 && *c.protocol.gamma < 1)) {
        problems.push_back("protocol \"local\" needs 0 < gamma < 1");
      }
      if (n == "constant" && !(c.protocol.alpha && *c.protocol.alpha >= 0 && *c.protocol.alpha <= 1)) {
        problems.push_back("protocol \"constant\" needs 0 <= alpha <= 1");
      }
      if (n == "table" && !c.protocol.path) problems.push_back("protocol \"table\" needs \"path\"");
    }
  }

  int k = 0;
  get_int("k", k, 1, false);
  if (!j.contains("times") || !j.at("times").is_array() || j.at("times").empty()) {
    problems.push_back("\"times\" must be a non-empty array");
  } else {
    for (const auto& t : j.at("times")) {
      if (!t.is_number_integer() || t.get<int>() < 1) {
        problems.push_back("every entry of \"times\" must be an integer >= 1");
        break;
      }
      c.times.push_back(t.get<int>());
    }
    if (k > 0 && c.times.size() == 1) c.times.assign(static_cast<std::size_t>(k), c.times[0]);
    if (k > 0 && static_cast<int>(c.times.size()) != k) {
      problems.push_back("\"times\" has " + std::to_string(c.times.size()) +
                         " entries but k = " + std::to_string(k));
    }
  }

  if (!j.contains("estimators") || !j.at("estimators").is_array() || j.at("estimators").empty()) {
    problems.push_back("\"estimators\" must be a non-empty array");
  } else {
    std::size_t idx = 0;
    for (const auto& e : j.at("estimators")) {
      const std::string where = "estimators[" + std::to_string(idx++) + "]: ";
      EstimatorRun run;
      if (!e.contains("method") || !e.at("method").is_string()) {
        problems.push_back(where + "missing \"method\"");
        continue;
      }
      try {
        run.spec.method = parse_method(e.at("method").get<std::string>());
      } catch (const std::exception& ex) {
        problems.push_back(where + ex.what());
        continue;
      }
      run.label = e.value("label", method_name(run.spec.method));
      run.spec.search_depth = e.value("search_depth", 3);
      if (run.spec.search_depth < 0) problems.push_back(where + "search_depth must be >= 0");
      const auto m = run.spec.method;
      if (!c.times.empty()) {
        if (c.times.size() < min_snapshots(m)) {
          problems.push_back(where + method_name(m) + " needs " +
                             std::to_string(min_snapshots(m)) + " snapshots");
        }
        const auto used = std::min(c.times.size(), snapshots_used(m, c.times.size()));
        for (std::size_t i = 0; i < used; ++i) {
          const int t = c.times[i];
          if (is_likelihood(m) && t < 2) problems.push_back(where + "likelihood needs t >= 2");
          if (m == Method::mle_cases && (t % 2 == 0 ? t < 4 : t < 5)) {
            problems.push_back(where + "mle-cases needs even t >= 4 and odd t >= 5");
          }
        }
        if (m == Method::mle_cases && c.protocol.name != "uniform") {
          problems.push_back(where + "mle-cases is only valid for the uniform protocol");
        }
      }
      if (e.contains("targets")) {
        for (const auto& t : e.at("targets")) {
          TargetSpec ts;
          if (t.contains("formula")) {
            ts.formula = t.at("formula").get<std::string>();
            if (t.contains("args")) ts.args = t.at("args");
            const auto names = target_formulas();
            if (std::find(names.begin(), names.end(), ts.formula) == names.end()) {
              problems.push_back(where + "unknown target formula \"" + ts.formula + "\"");
            }
          } else if (t.contains("kind") && t.contains("value")) {
            auto kind = parse_kind(t.at("kind").get<std::string>());
            if (!kind) {
              problems.push_back(where + "target kind must be exact, lower_bound or upper_bound");
            } else {
              Target fixed;
              fixed.kind = *kind;
              fixed.value = fixed.raw = t.at("value").get<double>();
              fixed.formula = "fixed";
              ts.fixed = fixed;
            }
          } else {
            problems.push_back(where + "target needs \"formula\" or \"kind\" + \"value\"");
          }
          run.targets.push_back(std::move(ts));
        }
      }
      c.estimators.push_back(std::move(run));
    }
  }

  if (problems.empty()) {
    for (const auto& e : c.estimators) {
      for (const auto& t : e.targets) {
        try {
          (void)resolve(t, c);
        } catch (const std::exception& ex) {
          problems.push_back(e.label + ": target " + t.formula + ": " + ex.what());
        }
      }
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json protocol = {{"name", c.protocol.name}};
  if (c.protocol.gamma) protocol["gamma"] = *c.protocol.gamma;
  if (c.protocol.alpha) protocol["alpha"] = *c.protocol.alpha;
  if (c.protocol.path) protocol["path"] = *c.protocol.path;
  nlohmann::json ests = nlohmann::json::array();
  for (const auto& e : c.estimators) {
    nlohmann::json targets = nlohmann::json::array();
    for (const auto& t : e.targets) {
      if (t.fixed) {
        targets.push_back({{"kind", kind_name(t.fixed->kind)}, {"value", t.fixed->value}});
      } else {
        targets.push_back({{"formula", t.formula}, {"args", t.args}});
      }
    }
    ests.push_back({{"method", method_name(e.spec.method)},
                    {"label", e.label},
                    {"search_depth", e.spec.search_depth},
                    {"targets", targets}});
  }
  return {{"d", c.d},           {"protocol", protocol}, {"times", c.times}, {"k", c.k()},
          {"trials", c.trials}, {"seed", c.seed},       {"estimators", ests}};
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::informational: return "informational";
  }
  return "unknown";
}

std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

TargetCheck check_target(const Target& target, std::uint64_t successes, std::uint64_t trials) {
  TargetCheck c;
  c.target = target;
  const double n = static_cast<double>(std::max<std::uint64_t>(trials, 1));
  const double f = static_cast<double>(successes) / n;
  const double v = target.value;
  switch (target.kind) {
    case TargetKind::exact:
      c.sigma = std::sqrt(v * (1 - v) / n);
      c.verdict = std::abs(f - v) <= 3 * c.sigma ? Verdict::pass : Verdict::fail;
      break;
    case TargetKind::lower_bound:
      c.sigma = std::sqrt(f * (1 - f) / n);
      c.verdict = f >= v - 3 * c.sigma ? Verdict::pass : Verdict::fail;
      break;
    case TargetKind::upper_bound:
      c.sigma = std::sqrt(f * (1 - f) / n);
      c.verdict = f <= v + 3 * c.sigma ? Verdict::pass : Verdict::fail;
      break;
  }
  if (target.vacuous) c.verdict = Verdict::informational;
  return c;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const Protocol protocol = make_protocol(config.d, config.protocol);
  const int k = config.k();
  const std::size_t n_est = config.estimators.size();

  int hop_horizon = 2;
  for (int t : config.times) hop_horizon = std::max(hop_horizon, t - t % 2);
  bool need_hop = false;
  for (const auto& e : config.estimators) need_hop = need_hop || is_likelihood(e.spec.method);
  std::optional<HopDistribution> hop;
  if (need_hop) hop = hop_distribution(protocol, hop_horizon);
  const ModelView model{&protocol, hop ? &*hop : nullptr};

  struct Tally {
    std::vector<std::uint64_t> successes;
    std::vector<std::uint64_t> errors;
  };
  const unsigned threads =
      static_cast<unsigned>(std::min<std::uint64_t>(pick_threads(config.threads), config.trials));
  std::vector<Tally> tallies(threads, Tally{std::vector<std::uint64_t>(n_est, 0),
                                            std::vector<std::uint64_t>(n_est, 0)});
  std::atomic<std::uint64_t> next_block{0};
  constexpr std::uint64_t kBlock = 256;

  auto worker = [&](unsigned id) {
    Tally& tally = tallies[id];
    std::vector<Snapshot> snaps(static_cast<std::size_t>(k));
    const VertexLabel source;
    for (;;) {
      const std::uint64_t begin = next_block.fetch_add(kBlock);
      if (begin >= config.trials) break;
      const std::uint64_t end = std::min(config.trials, begin + kBlock);
      for (std::uint64_t trial = begin; trial < end; ++trial) {
        for (int i = 0; i < k; ++i) {
          const int t = config.times[static_cast<std::size_t>(i)];
          const auto tr = simulate(protocol, t, derive_seed(config.seed, trial, static_cast<std::uint64_t>(i)));
          snaps[static_cast<std::size_t>(i)] = snapshot_at(tr, t);
        }
        for (std::size_t e = 0; e < n_est; ++e) {
          Rng rng(derive_seed(config.seed, trial, static_cast<std::uint64_t>(k) + e));
          try {
            const auto est = run_estimator(config.estimators[e].spec, snaps, model, rng);
            if (est.chosen == source) ++tally.successes[e];
          } catch (const PreconditionError&) {
            ++tally.errors[e];
          }
        }
      }
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker, i);
    for (auto& th : pool) th.join();
  }

  ExperimentReport report;
  report.config = config;
  report.verdict = Verdict::pass;
  for (std::size_t e = 0; e < n_est; ++e) {
    EstimatorReport er;
    er.label = config.estimators[e].label;
    er.method = config.estimators[e].spec.method;
    er.trials = config.trials;
    for (const auto& t : tallies) {
      er.successes += t.successes[e];
      er.errors += t.errors[e];
    }
    er.frequency = static_cast<double>(er.successes) / static_cast<double>(er.trials);
    std::tie(er.ci_low, er.ci_high) = wilson_interval(er.successes, er.trials);
    er.verdict = er.errors > 0 ? Verdict::fail : Verdict::informational;
    for (const auto& ts : config.estimators[e].targets) {
      auto check = check_target(resolve(ts, config), er.successes, er.trials);
      if (check.verdict == Verdict::fail) er.verdict = Verdict::fail;
      if (check.verdict == Verdict::pass && er.verdict == Verdict::informational) {
        er.verdict = Verdict::pass;
      }
      er.checks.push_back(std::move(check));
    }
    if (er.verdict == Verdict::fail) report.verdict = Verdict::fail;
    report.estimators.push_back(std::move(er));
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json ests = nlohmann::json::array();
  for (const auto& e : r.estimators) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : e.checks) {
      auto j = to_json(c.target);
      j["sigma"] = c.sigma;
      j["verdict"] = verdict_name(c.verdict);
      checks.push_back(std::move(j));
    }
    ests.push_back({{"label", e.label},
                    {"method", method_name(e.method)},
                    {"trials", e.trials},
                    {"successes", e.successes},
                    {"errors", e.errors},
                    {"frequency", e.frequency},
                    {"ci95", {e.ci_low, e.ci_high}},
                    {"targets", checks},
                    {"verdict", verdict_name(e.verdict)}});
  }
  return {{"report",
           {{"config", to_json(r.config)}, {"estimators", ests}, {"verdict", verdict_name(r.verdict)}}},
          {"wall_seconds", r.wall_seconds}};
}

void write_csv_summary(const ExperimentReport& r, std::ostream& out) {
  out << "label,method,trials,successes,errors,frequency,ci_low,ci_high,target_kind,target_value,"
         "verdict\n";
  auto row = [&](const EstimatorReport& e, const std::string& kind, double value,
                 const std::string& verdict) {
    out << e.label << ',' << method_name(e.method) << ',' << e.trials << ',' << e.successes << ','
        << e.errors << ',' << e.frequency << ',' << e.ci_low << ',' << e.ci_high << ',' << kind
        << ',' << value << ',' << verdict << '\n';
  };
  for (const auto& e : r.estimators) {
    if (e.checks.empty()) row(e, "", 0.0, verdict_name(e.verdict));
    for (const auto& c : e.checks) {
      row(e, kind_name(c.target.kind), c.target.value, verdict_name(c.verdict));
    }
  }
}

}  // namespace adiff
