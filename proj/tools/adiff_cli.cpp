#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "adiff/diffusion.hpp"
#include "adiff/errors.hpp"
#include "adiff/estimators.hpp"
#include "adiff/experiments.hpp"
#include "adiff/protocol.hpp"
#include "adiff/verify.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct ProtocolFlags {
  int d = 3;
  std::string name = "uniform";
  std::optional<double> gamma;
  std::optional<double> alpha;
  std::optional<std::string> table;

  void attach(CLI::App* app, bool with_degree = true) {
    if (with_degree) app->add_option("--d", d, "Tree degree")->check(CLI::Range(3, 255));
    app->add_option("--protocol", name, "uniform, perfect, local, constant or table");
    app->add_option("--gamma", gamma, "Spreading exponent for the local protocol");
    app->add_option("--alpha", alpha, "Stay probability for the constant protocol");
    app->add_option("--table", table, "CSV t,h,alpha for the table protocol");
  }

  adiff::Protocol build() const {
    adiff::ProtocolSpec spec;
    spec.name = name;
    spec.gamma = gamma;
    spec.alpha = alpha;
    spec.path = table;
    return adiff::make_protocol(d, spec);
  }
};

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return nlohmann::json::parse(in);
}

adiff::Method parse_method_alias(const std::string& s) {
  if (s == "mle") return adiff::Method::generic_mle;
  if (s == "cases") return adiff::Method::mle_cases;
  return adiff::parse_method(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive diffusion on regular trees: simulation, estimators and checks"};
  app.require_subcommand(1);

  ProtocolFlags sim_proto;
  int sim_t = 10;
  std::uint64_t sim_seed = 0;
  bool sim_json = true;
  auto* sim = app.add_subcommand("simulate", "Simulate one virtual-source trajectory");
  sim_proto.attach(sim);
  sim->add_option("-t", sim_t, "Final time")->check(CLI::NonNegativeNumber);
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_flag("--json", sim_json, "Print JSON (the only format)");

  ProtocolFlags hd_proto;
  int hd_T = 10;
  bool hd_exact = false;
  auto* hd = app.add_subcommand("hopdist", "Print the hop distribution as CSV t,h,p");
  hd_proto.attach(hd);
  hd->add_option("-T", hd_T, "Largest even time")->check(CLI::PositiveNumber);
  hd->add_flag("--exact", hd_exact, "Rational values (built-in protocols only)");

  ProtocolFlags est_proto;
  std::string est_file;
  std::string est_method = "generic-mle";
  std::uint64_t est_seed = 0;
  int est_depth = 3;
  auto* est = app.add_subcommand("estimate", "Run one estimator on snapshots from a JSON file");
  est_proto.attach(est, false);
  est->add_option("--snapshots", est_file, "JSON array of snapshots")->required();
  est->add_option("--method", est_method,
                  "single-mle, two-path, three-intersection, k-subtree, generic-mle (mle), "
                  "mle-cases (cases)");
  est->add_option("--seed", est_seed, "Tie-break seed");
  est->add_option("--search-depth", est_depth, "Fringe depth for generic-mle")
      ->check(CLI::NonNegativeNumber);

  std::string exp_config;
  std::string exp_out;
  std::string exp_csv;
  auto* exp = app.add_subcommand("experiment", "Run a Monte Carlo experiment config");
  exp->add_option("--config", exp_config, "Experiment config JSON")->required();
  exp->add_option("--out", exp_out, "Report path (stdout when omitted)");
  exp->add_option("--csv", exp_csv, "Also write a CSV summary here");

  std::string ver_suite = "all";
  auto* ver = app.add_subcommand("verify", "Run an exact verification suite");
  ver->add_option("--suite", ver_suite, "Suite name");

  ProtocolFlags dump_proto;
  int dump_T = 10;
  auto* dump = app.add_subcommand("protocol-dump", "Print alpha(t,h) as CSV t,h,alpha");
  dump_proto.attach(dump);
  dump->add_option("-T", dump_T, "Largest even time")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*sim) {
      const auto tr = adiff::simulate(sim_proto.build(), sim_t, sim_seed);
      std::cout << adiff::to_json(tr).dump(2) << '\n';
      return kPass;
    }

    if (*hd) {
      const auto p = hd_proto.build();
      if (hd_exact) {
        adiff::exact_hop_distribution(p, hd_T).write_csv(std::cout);
      } else {
        adiff::hop_distribution(p, hd_T).write_csv(std::cout);
      }
      return kPass;
    }

    if (*est) {
      const auto j = read_json(est_file);
      if (!j.is_array() || j.empty()) throw std::invalid_argument("snapshots file must be a non-empty JSON array");
      std::vector<adiff::Snapshot> snaps;
      for (const auto& s : j) snaps.push_back(adiff::snapshot_from_json(s));
      est_proto.d = snaps.front().d;
      const auto p = est_proto.build();
      int horizon = 2;
      for (const auto& s : snaps) horizon = std::max(horizon, s.t - s.t % 2);
      const auto hop = adiff::hop_distribution(p, horizon);
      adiff::Rng rng(est_seed);
      const adiff::EstimatorSpec spec{parse_method_alias(est_method), est_depth};
      const auto e = adiff::run_estimator(spec, snaps, {&p, &hop}, rng);
      std::cout << adiff::to_json(e).dump(2) << '\n';
      return kPass;
    }

    if (*exp) {
      adiff::ExperimentConfig config;
      try {
        config = adiff::parse_config(read_json(exp_config));
      } catch (const adiff::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kUsage;
      }
      const auto report = adiff::run_experiment(config);
      const std::string body = adiff::to_json(report).dump(2);
      if (exp_out.empty()) {
        std::cout << body << '\n';
      } else {
        std::ofstream(exp_out) << body << '\n';
      }
      if (!exp_csv.empty()) {
        std::ofstream csv(exp_csv);
        adiff::write_csv_summary(report, csv);
      }
      for (const auto& e : report.estimators) {
        std::cerr << e.label << ": " << e.successes << '/' << e.trials << " -> "
                  << adiff::verdict_name(e.verdict) << '\n';
      }
      return report.failed() ? kFail : kPass;
    }

    if (*ver) {
      std::vector<adiff::CheckResult> results;
      try {
        results = adiff::run_verify(ver_suite);
      } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << '\n';
        return kUsage;
      }
      bool all = true;
      for (const auto& r : results) {
        std::printf("%-4s  %-18s  %s  (%s)\n", r.pass ? "PASS" : "FAIL", r.suite.c_str(),
                    r.name.c_str(), r.detail.c_str());
        all = all && r.pass;
      }
      return all ? kPass : kFail;
    }

    if (*dump) {
      const auto p = dump_proto.build();
      std::cout << "t,h,alpha\n";
      for (int t = 2; t <= dump_T; t += 2) {
        for (int h = 1; h <= t / 2; ++h) {
          std::cout << t << ',' << h << ',';
          if (auto a = p.kind() == adiff::Protocol::Kind::constant ? std::nullopt : p.alpha_exact(t, h)) {
            std::cout << adiff::to_string(*a);
          } else {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", p.alpha(t, h));
            std::cout << buf;
          }
          std::cout << '\n';
        }
      }
      return kPass;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
  return kUsage;
}
