#include "adiff/protocol.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

namespace adiff {
namespace {

// Guards floor() against gamma*t landing a hair below an integer.
constexpr double kFloorSlack = 1e-9;

void check_even_time(int t, int h) {
  if (t < 2 || t % 2 != 0) {
    throw DomainError("alpha is defined at even t >= 2, got t=" + std::to_string(t));
  }
  if (h < 1 || h > t / 2) {
    throw DomainError("alpha(t=" + std::to_string(t) + ", h=" + std::to_string(h) +
                      ") needs 1 <= h <= t/2");
  }
}

void check_degree(int d) {
  if (d < 3) throw DomainError("protocol degree must be >= 3, got " + std::to_string(d));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_field(std::string_view field, int line, const char* what) {
  field = trim(field);
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw std::invalid_argument("protocol table line " + std::to_string(line) + ": bad " + what +
                                " \"" + std::string(field) + "\"");
  }
  return value;
}

}  // namespace

Rational alpha_uniform(int t, int h) {
  check_even_time(t, h);
  return ratio(t - 2 * h + 2, t + 2);
}

Rational alpha_perfect_exact(int d, int t, int h) {
  check_degree(d);
  check_even_time(t, h);
  Integer num = ipow(d - 1, t / 2 - h + 1) - 1;
  Integer den = ipow(d - 1, t / 2 + 1) - 1;
  return Rational(num, den);
}

double alpha_perfect(int d, int t, int h) {
  check_degree(d);
  check_even_time(t, h);
  // q^{m} - 1 over q^{n} - 1 rewritten as q^{m-n} (1 - q^{-m})/(1 - q^{-n}).
  const double q = d - 1;
  const int m = t / 2 - h + 1;
  const int n = t / 2 + 1;
  return std::pow(q, -h) * (1.0 - std::pow(q, -m)) / (1.0 - std::pow(q, -n));
}

int alpha_local_spreading(double gamma, int t, int h) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw DomainError("local spreading needs 0 < gamma < 1, got " + std::to_string(gamma));
  }
  check_even_time(t, h);
  if (gamma * t <= 2.0 + kFloorSlack) return 1;
  const auto now = static_cast<long>(std::floor(gamma * t / 2.0 + kFloorSlack));
  const auto next = static_cast<long>(std::floor(gamma * (t + 2) / 2.0 + kFloorSlack));
  return now == next ? 1 : 0;
}

int local_spreading_hop(double gamma, int t) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw DomainError("local spreading needs 0 < gamma < 1, got " + std::to_string(gamma));
  }
  if (t < 2 || t % 2 != 0) throw DomainError("local_spreading_hop needs even t >= 2");
  if (gamma * t <= 2.0 + kFloorSlack) return 1;
  return static_cast<int>(std::floor(gamma * t / 2.0 + kFloorSlack));
}

Protocol::Protocol(int d, Kind kind, double param) : d_(d), kind_(kind), param_(param) {
  check_degree(d);
}

Protocol Protocol::uniform(int d) { return Protocol(d, Kind::uniform, 0.0); }

Protocol Protocol::perfect(int d) { return Protocol(d, Kind::perfect, 0.0); }

Protocol Protocol::local_spreading(int d, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw DomainError("local spreading needs 0 < gamma < 1, got " + std::to_string(gamma));
  }
  return Protocol(d, Kind::local_spreading, gamma);
}

Protocol Protocol::constant(int d, double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw DomainError("constant alpha must lie in [0, 1], got " + std::to_string(value));
  }
  return Protocol(d, Kind::constant, value);
}

Protocol Protocol::from_table(int d, std::istream& csv) {
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  std::map<std::pair<int, int>, double> entries;
  while (std::getline(csv, line)) {
    ++line_no;
    std::string_view row = trim(line);
    if (row.empty()) continue;
    if (!header_seen) {
      if (row != "t,h,alpha") {
        throw std::invalid_argument("protocol table must start with header \"t,h,alpha\"");
      }
      header_seen = true;
      continue;
    }
    const auto c1 = row.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : row.find(',', c1 + 1);
    if (c2 == std::string_view::npos || row.find(',', c2 + 1) != std::string_view::npos) {
      throw std::invalid_argument("protocol table line " + std::to_string(line_no) +
                                  ": expected three fields");
    }
    const int t = parse_field<int>(row.substr(0, c1), line_no, "t");
    const int h = parse_field<int>(row.substr(c1 + 1, c2 - c1 - 1), line_no, "h");
    const double a = parse_field<double>(row.substr(c2 + 1), line_no, "alpha");
    const std::string where = "protocol table line " + std::to_string(line_no) + ": ";
    if (t < 2 || t % 2 != 0) throw DomainError(where + "t must be even and >= 2");
    if (h < 1 || h > t / 2) throw DomainError(where + "h must lie in 1..t/2");
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError(where + "alpha must lie in [0, 1]");
    if (!entries.emplace(std::make_pair(t, h), a).second) {
      throw std::invalid_argument(where + "duplicate entry for (t=" + std::to_string(t) +
                                  ", h=" + std::to_string(h) + ")");
    }
  }
  if (!header_seen) throw std::invalid_argument("protocol table is empty");
  if (entries.empty()) throw std::invalid_argument("protocol table has no rows");

  const int t_max = entries.rbegin()->first.first;
  auto table = std::make_shared<std::vector<std::vector<double>>>();
  for (int t = 2; t <= t_max; t += 2) {
    std::vector<double> row;
    for (int h = 1; h <= t / 2; ++h) {
      auto it = entries.find({t, h});
      if (it == entries.end()) {
        throw std::invalid_argument("protocol table is missing (t=" + std::to_string(t) +
                                    ", h=" + std::to_string(h) + ")");
      }
      row.push_back(it->second);
    }
    table->push_back(std::move(row));
  }
  Protocol p(d, Kind::table, 0.0);
  p.horizon_ = t_max;
  p.table_ = std::move(table);
  return p;
}

Protocol Protocol::from_table_file(int d, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open protocol table " + path);
  return from_table(d, in);
}

std::string Protocol::name() const {
  switch (kind_) {
    case Kind::uniform: return "uniform";
    case Kind::perfect: return "perfect";
    case Kind::local_spreading: return "local";
    case Kind::constant: return "constant";
    case Kind::table: return "table";
  }
  return "unknown";
}

void Protocol::check_domain(int t, int h) const {
  check_even_time(t, h);
  if (horizon_ && t > *horizon_) {
    throw HorizonError("protocol table ends at t=" + std::to_string(*horizon_) +
                       ", asked for t=" + std::to_string(t));
  }
}

double Protocol::alpha(int t, int h) const {
  check_domain(t, h);
  switch (kind_) {
    case Kind::uniform: return static_cast<double>(t - 2 * h + 2) / (t + 2);
    case Kind::perfect: return alpha_perfect(d_, t, h);
    case Kind::local_spreading: return alpha_local_spreading(param_, t, h);
    case Kind::constant: return param_;
    case Kind::table:
      return (*table_)[static_cast<std::size_t>(t / 2 - 1)][static_cast<std::size_t>(h - 1)];
  }
  return 0.0;
}

std::optional<Rational> Protocol::alpha_exact(int t, int h) const {
  check_domain(t, h);
  switch (kind_) {
    case Kind::uniform: return alpha_uniform(t, h);
    case Kind::perfect: return alpha_perfect_exact(d_, t, h);
    case Kind::local_spreading: return Rational(alpha_local_spreading(param_, t, h));
    // The binary value of the double, which is what the float path uses too.
    case Kind::constant: return Rational(param_);
    case Kind::table: return std::nullopt;
  }
  return std::nullopt;
}

void Protocol::require_alpha_until(int t_limit) const {
  if (!horizon_) return;
  int last_needed = t_limit - 1;
  if (last_needed % 2 != 0) --last_needed;
  if (last_needed > *horizon_) {
    throw HorizonError("protocol table ends at t=" + std::to_string(*horizon_) +
                       ", alpha needed up to t=" + std::to_string(last_needed));
  }
}

namespace {

template <class S, class AlphaFn>
std::vector<std::vector<S>> run_dp(int T, AlphaFn alpha) {
  if (T < 2 || T % 2 != 0) {
    throw DomainError("hop distribution horizon must be even and >= 2, got " + std::to_string(T));
  }
  std::vector<std::vector<S>> rows;
  rows.push_back({S(1)});
  for (int t = 2; t + 2 <= T; t += 2) {
    const auto& cur = rows.back();
    std::vector<S> next(static_cast<std::size_t>(t / 2 + 1), S(0));
    for (int h = 1; h <= t / 2; ++h) {
      const S& mass = cur[static_cast<std::size_t>(h - 1)];
      if (mass == 0) continue;
      const S a = alpha(t, h);
      next[static_cast<std::size_t>(h - 1)] += a * mass;
      next[static_cast<std::size_t>(h)] += (S(1) - a) * mass;
    }
    rows.push_back(std::move(next));
  }
  return rows;
}

}  // namespace

HopDistribution hop_distribution(const Protocol& p, int T) {
  if (p.horizon() && T > *p.horizon()) {
    throw HorizonError("hop distribution to t=" + std::to_string(T) +
                       " exceeds protocol horizon " + std::to_string(*p.horizon()));
  }
  auto rows = run_dp<double>(T, [&](int t, int h) { return p.alpha(t, h); });
  return HopDistribution(p.degree(), p.name(), std::move(rows));
}

ExactHopDistribution exact_hop_distribution(const Protocol& p, int T) {
  if (!p.has_exact_alpha()) {
    throw DomainError("exact hop distribution needs a closed-form protocol, got " + p.name());
  }
  auto rows = run_dp<Rational>(T, [&](int t, int h) { return *p.alpha_exact(t, h); });
  return ExactHopDistribution(p.degree(), p.name(), std::move(rows));
}

namespace {

template <class S, class Hop, class AlphaFn>
S stay_sum(int t_odd, const Hop& hop, AlphaFn alpha) {
  if (t_odd < 3 || t_odd % 2 == 0) {
    throw DomainError("stay probability needs odd t >= 3, got " + std::to_string(t_odd));
  }
  const int te = t_odd - 1;
  S total(0);
  for (int h = 1; h <= te / 2; ++h) {
    const S mass = hop.at(te, h);
    if (mass != 0) total += mass * alpha(te, h);
  }
  return total;
}

}  // namespace

double stay_probability_at(const Protocol& p, int t_odd, const HopDistribution& hop) {
  return stay_sum<double>(t_odd, hop, [&](int t, int h) { return p.alpha(t, h); });
}

Rational stay_probability_at(const Protocol& p, int t_odd, const ExactHopDistribution& hop) {
  if (!p.has_exact_alpha()) throw DomainError("exact stay probability needs a closed-form protocol");
  return stay_sum<Rational>(t_odd, hop, [&](int t, int h) { return *p.alpha_exact(t, h); });
}

}  // namespace adiff
