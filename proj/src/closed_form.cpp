#include "adiff/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "adiff/errors.hpp"

namespace adiff {
namespace {

void need(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

void check_d(int d) { need(d >= 3, "degree must be >= 3"); }

Target probability(TargetKind kind, double raw, std::string formula) {
  Target t;
  t.kind = kind;
  t.raw = raw;
  t.value = std::clamp(raw, 0.0, 1.0);
  t.vacuous = raw < 0.0 || raw > 1.0;
  t.probability = true;
  t.formula = std::move(formula);
  return t;
}

Target quantity(TargetKind kind, double value, std::string formula) {
  Target t;
  t.kind = kind;
  t.raw = value;
  t.value = value;
  t.probability = false;
  t.formula = std::move(formula);
  return t;
}

}  // namespace

std::string kind_name(TargetKind k) {
  switch (k) {
    case TargetKind::exact: return "exact";
    case TargetKind::lower_bound: return "lower_bound";
    case TargetKind::upper_bound: return "upper_bound";
  }
  return "unknown";
}

nlohmann::json to_json(const Target& t) {
  return {{"kind", kind_name(t.kind)}, {"value", t.value},       {"raw", t.raw},
          {"vacuous", t.vacuous},      {"probability", t.probability}, {"formula", t.formula}};
}

Target two_path_lower(int d, int t1, int t2) {
  check_d(d);
  need(t1 >= 2 && t2 >= 2, "two-snapshot bounds need t1, t2 >= 2");
  const double m = std::min(t1, t2);
  return probability(TargetKind::lower_bound, (d - 1.0) / d * 2.0 / m, "(d-1)/d * 2/min(t1,t2)");
}

Target two_snapshot_upper(int d, int t1, int t2) {
  check_d(d);
  need(t1 >= 2 && t2 >= 2, "two-snapshot bounds need t1, t2 >= 2");
  const double m = std::min(t1, t2);
  return probability(TargetKind::upper_bound, (d - 1.0) / d * 7.0 / m, "(d-1)/d * 7/min(t1,t2)");
}

EvenEvenParts even_even_mle_parts(int d, int t1, int t2) {
  check_d(d);
  need(t1 >= 4 && t2 >= 4 && t1 % 2 == 0 && t2 % 2 == 0, "even-even MLE needs even t1, t2 >= 4");
  EvenEvenParts p;
  p.separated = ratio(2 * t1 + 2 * t2 - 4, static_cast<long long>(t1) * t2);
  p.shared = ratio(4, static_cast<long long>(t1) * t2) * (ratio(1, d) + ratio(1, d - 1));
  p.total = ratio(d - 1, d) * p.separated + ratio(1, d) * p.shared;
  return p;
}

Target even_even_mle_exact(int d, int t1, int t2) {
  return probability(TargetKind::exact, to_double(even_even_mle_parts(d, t1, t2).total),
                     "(d-1)/d (2t1+2t2-4)/(t1 t2) + 1/d 4/(t1 t2) (1/d + 1/(d-1))");
}

Rational even_odd_mle_rational(int d, int t_even, int t_odd) {
  check_d(d);
  need(t_even >= 4 && t_even % 2 == 0 && t_odd >= 5 && t_odd % 2 == 1,
       "even-odd MLE needs even t >= 4 and odd t >= 5");
  const long long te = t_even;
  const long long to = t_odd;
  const Rational inner = ratio(2, te) + ratio(4, to + 1) - ratio(8, te * (to + 1));
  const Rational shared =
      ratio(4, te * (to + 1)) * (ratio(1, d) + ratio(1, d - 1) + ratio(6, (to - 1) * (d - 1)));
  return ratio(d - 1, d) * inner + ratio(1, d) * shared;
}

Target even_odd_mle_exact(int d, int t_even, int t_odd) {
  return probability(TargetKind::exact, to_double(even_odd_mle_rational(d, t_even, t_odd)),
                     "(d-1)/d (2/te + 4/(to+1) - 8/(te(to+1))) + "
                     "1/d 4/(te(to+1)) (1/d + 1/(d-1) + 6/((to-1)(d-1)))");
}

Target even_odd_mle_upper(int d, int t_even, int t_odd) {
  check_d(d);
  const double m = std::min(t_even, t_odd);
  return probability(TargetKind::upper_bound, (d - 1.0) / d * 6.0 / m, "(d-1)/d * 6/min(t1,t2)");
}

Target odd_odd_mle_upper(int d, int t1, int t2) {
  check_d(d);
  need(t1 >= 5 && t2 >= 5 && t1 % 2 == 1 && t2 % 2 == 1, "odd-odd bound needs odd t1, t2 >= 5");
  const double m = std::min(t1, t2);
  return probability(TargetKind::upper_bound, (d - 1.0) / d * (20.0 / 3.0) / (m + 1.0),
                     "(d-1)/d * (20/3)/(min(t1,t2)+1)");
}

Target three_snapshot_lower(int d) {
  check_d(d);
  const double dd = d;
  return probability(TargetKind::lower_bound, (dd - 1) * (dd - 2) / (dd * dd), "(d-1)(d-2)/d^2");
}

Target k_snapshot_lower(int d, int k) {
  check_d(d);
  need(k >= 1, "k must be >= 1");
  const double dd = d;
  const double raw = 1.0 - dd * std::exp(-(dd - 2) * (dd - 2) * k / (2 * dd * dd));
  return probability(TargetKind::lower_bound, raw, "1 - d exp(-(d-2)^2 k/(2 d^2))");
}

Target radius_upper(int d, int t, double gamma, double C) {
  check_d(d);
  need(t >= 2, "t must be >= 2");
  need(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
  need(C > 0.0, "C must be positive");
  const double value = (1.0 - gamma) * t / 2.0 + std::log(C * t) / std::log(d - 1.0) + 2.0;
  return quantity(TargetKind::upper_bound, value, "(1-gamma) t/2 + log(C t)/log(d-1) + 2");
}

Integer ball_count(int d, int t) {
  check_d(d);
  need(t >= 0 && t % 2 == 0, "N_t is defined here for even t");
  return Integer(d) * (ipow(d - 1, t / 2) - 1) / (d - 2) + 1;
}

std::pair<Target, Target> local_spreading_targets(int d, int t, double gamma) {
  check_d(d);
  need(t >= 2 && t % 2 == 0, "local spreading targets need even t >= 2");
  need(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
  Target radius = gamma * t <= 2.0 + 1e-9
                      ? quantity(TargetKind::exact, t / 2.0 - 1.0, "t/2 - 1")
                      : quantity(TargetKind::lower_bound, (1.0 - gamma) * t / 2.0, "(1-gamma) t/2");
  const double n = ball_count(d, t).convert_to<double>();
  Target mle = probability(TargetKind::upper_bound, 2.0 * (d - 1) / std::pow(n, gamma),
                           "2(d-1)/N_t^gamma");
  return {radius, mle};
}

Target perfect_single_mle_exact(int d, int t) {
  const Integer n = ball_count(d, t);
  return probability(TargetKind::exact, to_double(Rational(Integer(1), n - 1)), "1/(N_t - 1)");
}

Rational path_sum(int s, int t) {
  need(s >= 1 && t >= 1, "path sum needs s, t >= 1");
  Rational total = 0;
  for (int j = 1; j <= s; ++j) {
    for (int l = 1; l <= t; ++l) {
      total += ratio(1, 1 + std::min(j - 1, t - l) + std::min(l - 1, s - j));
    }
  }
  return total;
}

namespace {

using Evaluator = std::function<Target(const nlohmann::json&)>;

int arg_int(const nlohmann::json& a, const char* key) {
  if (!a.contains(key)) throw std::invalid_argument(std::string("target needs argument \"") + key + "\"");
  return a.at(key).get<int>();
}

double arg_double(const nlohmann::json& a, const char* key) {
  if (!a.contains(key)) throw std::invalid_argument(std::string("target needs argument \"") + key + "\"");
  return a.at(key).get<double>();
}

const std::map<std::string, Evaluator>& registry() {
  static const std::map<std::string, Evaluator> table = {
      {"two-path-lower",
       [](const auto& a) { return two_path_lower(arg_int(a, "d"), arg_int(a, "t1"), arg_int(a, "t2")); }},
      {"two-snapshot-upper",
       [](const auto& a) {
         return two_snapshot_upper(arg_int(a, "d"), arg_int(a, "t1"), arg_int(a, "t2"));
       }},
      {"even-even-mle",
       [](const auto& a) {
         return even_even_mle_exact(arg_int(a, "d"), arg_int(a, "t1"), arg_int(a, "t2"));
       }},
      {"even-odd-mle",
       [](const auto& a) {
         return even_odd_mle_exact(arg_int(a, "d"), arg_int(a, "t1"), arg_int(a, "t2"));
       }},
      {"even-odd-mle-upper",
       [](const auto& a) {
         return even_odd_mle_upper(arg_int(a, "d"), arg_int(a, "t1"), arg_int(a, "t2"));
       }},
      {"odd-odd-mle-upper",
       [](const auto& a) {
         return odd_odd_mle_upper(arg_int(a, "d"), arg_int(a, "t1"), arg_int(a, "t2"));
       }},
      {"three-snapshot-lower", [](const auto& a) { return three_snapshot_lower(arg_int(a, "d")); }},
      {"k-snapshot-lower",
       [](const auto& a) { return k_snapshot_lower(arg_int(a, "d"), arg_int(a, "k")); }},
      {"radius-upper",
       [](const auto& a) {
         return radius_upper(arg_int(a, "d"), arg_int(a, "t"), arg_double(a, "gamma"),
                             arg_double(a, "C"));
       }},
      {"local-radius",
       [](const auto& a) {
         return local_spreading_targets(arg_int(a, "d"), arg_int(a, "t"), arg_double(a, "gamma")).first;
       }},
      {"local-mle-upper",
       [](const auto& a) {
         return local_spreading_targets(arg_int(a, "d"), arg_int(a, "t"), arg_double(a, "gamma"))
             .second;
       }},
      {"perfect-single-mle",
       [](const auto& a) { return perfect_single_mle_exact(arg_int(a, "d"), arg_int(a, "t")); }},
  };
  return table;
}

}  // namespace

std::vector<std::string> target_formulas() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : registry()) names.push_back(name);
  return names;
}

Target evaluate_target(const std::string& formula, const nlohmann::json& args) {
  const auto& table = registry();
  auto it = table.find(formula);
  if (it == table.end()) {
    std::string known;
    for (const auto& [name, fn] : table) known += (known.empty() ? "" : ", ") + name;
    throw std::invalid_argument("unknown target formula \"" + formula + "\"; known: " + known);
  }
  return it->second(args);
}

}  // namespace adiff
