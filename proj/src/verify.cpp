#include "adiff/verify.hpp"

#include <cmath>
#include <stdexcept>

#include "adiff/closed_form.hpp"
#include "adiff/oracle.hpp"
#include "adiff/protocol.hpp"

namespace adiff {
namespace {

using Results = std::vector<CheckResult>;

void add(Results& out, const std::string& suite, std::string name, bool pass, std::string detail) {
  out.push_back({suite, std::move(name), pass, std::move(detail)});
}

void identities(Results& out) {
  const std::string suite = "identities";
  for (int d = 3; d <= 5; ++d) {
    const auto hop = exact_hop_distribution(Protocol::uniform(d), 60);
    bool ok = true;
    for (int t = 2; t <= 60 && ok; t += 2) {
      for (int h = 1; h <= t / 2; ++h) ok = ok && hop.at(t, h) == ratio(2, t);
    }
    add(out, suite, "uniform p(t,h) = 2/t, t <= 60, d=" + std::to_string(d), ok, "rational DP");
  }
  for (int d = 3; d <= 5; ++d) {
    const auto hop = exact_hop_distribution(Protocol::perfect(d), 30);
    bool ok = true;
    for (int t = 2; t <= 30 && ok; t += 2) {
      const Integer n1 = ball_count(d, t) - 1;
      for (int h = 1; h <= t / 2; ++h) {
        ok = ok && hop.at(t, h) * Rational(n1) == Rational(Integer(d) * ipow(d - 1, h - 1));
      }
    }
    add(out, suite, "perfect p(t,h)(N_t-1) = d(d-1)^(h-1), t <= 30, d=" + std::to_string(d), ok,
        "rational DP");
  }
  {
    const Protocol p = Protocol::uniform(3);
    const auto hop = exact_hop_distribution(p, 40);
    bool ok = true;
    for (int t = 5; t <= 41; t += 2) ok = ok && stay_probability_at(p, t, hop) == ratio(1, 2);
    add(out, suite, "uniform stay probability = 1/2, odd t in 5..41", ok, "rational DP");
  }
  {
    bool ok = true;
    std::string first_bad;
    for (int t = 1; t <= 30; ++t) {
      for (int s = 1; s <= t; ++s) {
        if (path_sum(s, t) != Rational(s + t - 1)) {
          ok = false;
          if (first_bad.empty()) first_bad = "s=" + std::to_string(s) + " t=" + std::to_string(t);
        }
      }
    }
    add(out, suite, "sum 1/(1+min(j-1,t-l)+min(l-1,s-j)) = s+t-1, s <= t <= 30", ok,
        ok ? "exact" : "first mismatch at " + first_bad);
  }
}

void oracle_even_even(Results& out) {
  const std::string suite = "oracle-even-even";
  const Protocol p = Protocol::uniform(3);
  const Rational expected = even_even_mle_parts(3, 4, 4).total;
  for (Method m : {Method::mle_cases, Method::generic_mle}) {
    const Rational got = exact_success<Rational>({m, 3}, p, {4, 4});
    add(out, suite, method_name(m) + " d=3 t=(4,4) = " + to_string(expected), got == expected,
        "oracle " + to_string(got));
  }
}

void oracle_even_odd(Results& out) {
  const std::string suite = "oracle-even-odd";
  const Protocol p = Protocol::uniform(3);
  const double expected = even_odd_mle_exact(3, 4, 5).value;
  for (Method m : {Method::mle_cases, Method::generic_mle}) {
    const double got = to_double(exact_success<Rational>({m, 3}, p, {4, 5}));
    add(out, suite, method_name(m) + " d=3 t=(4,5) matches closed form",
        std::abs(got - expected) <= 1e-12,
        "oracle " + std::to_string(got) + " closed form " + std::to_string(expected));
  }
}

void oracle_odd_odd(Results& out) {
  const std::string suite = "oracle-odd-odd";
  const Protocol p = Protocol::uniform(3);
  const double bound = odd_odd_mle_upper(3, 5, 5).value;
  for (Method m : {Method::mle_cases, Method::generic_mle}) {
    const double got = to_double(exact_success<Rational>({m, 3}, p, {5, 5}));
    add(out, suite, method_name(m) + " d=3 t=(5,5) below upper bound", got <= bound,
        "oracle " + std::to_string(got) + " bound " + std::to_string(bound));
  }
}

void local_spreading(Results& out) {
  const std::string suite = "local-spreading";
  const double gamma = 0.5;
  const int d = 3;
  const Protocol p = Protocol::local_spreading(d, gamma);
  const auto hop = hop_distribution(p, 40);
  for (int t = 6; t <= 40; t += 2) {
    const int h = static_cast<int>(std::floor(gamma * t / 2));
    bool ok = hop.at(t, h) == 1.0;
    const int r = t / 2 - h;
    if (t > 4) ok = ok && r >= (1 - gamma) * t / 2;
    const double success = single_mle_success_probability({&p, &hop}, t);
    const double formula = 1.0 / (d * std::pow(d - 1.0, h - 1));
    ok = ok && std::abs(success - formula) <= 1e-12 * formula;
    ok = ok && formula <= local_spreading_targets(d, t, gamma).second.raw;
    add(out, suite, "gamma=0.5 d=3 t=" + std::to_string(t), ok,
        "h=" + std::to_string(h) + " R=" + std::to_string(r));
  }
}

}  // namespace

std::vector<std::string> verify_suites() {
  return {"identities", "oracle-even-even", "oracle-even-odd", "oracle-odd-odd", "local-spreading",
          "all"};
}

std::vector<CheckResult> run_verify(const std::string& suite) {
  Results out;
  const bool all = suite == "all";
  bool known = all;
  auto run = [&](const char* name, void (*fn)(Results&)) {
    if (all || suite == name) {
      known = true;
      fn(out);
    }
  };
  run("identities", identities);
  run("oracle-even-even", oracle_even_even);
  run("oracle-even-odd", oracle_even_odd);
  run("oracle-odd-odd", oracle_odd_odd);
  run("local-spreading", local_spreading);
  if (!known) {
    std::string names;
    for (const auto& n : verify_suites()) names += (names.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown suite \"" + suite + "\"; valid suites: " + names);
  }
  return out;
}

}  // namespace adiff
