#pragma once

#include <cstddef>
#include <cstdio>
#include <iosfwd>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "adiff/errors.hpp"
#include "adiff/rational.hpp"

namespace adiff {

/// alpha(t, h) for the uniform protocol: (t - 2h + 2)/(t + 2).
Rational alpha_uniform(int t, int h);

/// ((d-1)^{t/2-h+1} - 1)/((d-1)^{t/2+1} - 1), exact.
Rational alpha_perfect_exact(int d, int t, int h);
/// Same value in floating point, stable for large t.
double alpha_perfect(int d, int t, int h);

/// 1 while t <= 2/gamma, afterwards 1 iff floor(gamma t/2) == floor(gamma (t+2)/2).
int alpha_local_spreading(double gamma, int t, int h);

/// The deterministic hop a local-spreading walk has at even time t:
/// 1 for t <= 2/gamma, floor(gamma t/2) afterwards.
int local_spreading_hop(double gamma, int t);

/// A degree plus the stay probabilities alpha(t, h) of the virtual source.
///
/// alpha is defined for even t >= 2 and 1 <= h <= t/2; anything else throws
/// DomainError. Table-backed protocols also throw HorizonError past their
/// last tabulated time.
class Protocol {
 public:
  enum class Kind { uniform, perfect, local_spreading, constant, table };

  static Protocol uniform(int d);
  static Protocol perfect(int d);
  static Protocol local_spreading(int d, double gamma);
  /// alpha(t, h) = value everywhere.
  static Protocol constant(int d, double value);
  /// CSV with header "t,h,alpha".
  static Protocol from_table(int d, std::istream& csv);
  static Protocol from_table_file(int d, const std::string& path);

  int degree() const noexcept { return d_; }
  Kind kind() const noexcept { return kind_; }
  /// "uniform", "perfect", "local", "constant" or "table".
  std::string name() const;
  double gamma() const noexcept { return param_; }
  double constant_value() const noexcept { return param_; }
  /// Last even t with an alpha value; unbounded for closed-form protocols.
  std::optional<int> horizon() const noexcept { return horizon_; }

  double alpha(int t, int h) const;
  /// Exact value for the closed-form protocols, nullopt for tables.
  std::optional<Rational> alpha_exact(int t, int h) const;
  bool has_exact_alpha() const noexcept { return kind_ != Kind::table; }

  /// Throws HorizonError when alpha is needed at an even time >= t_limit
  /// beyond the horizon.
  void require_alpha_until(int t_limit) const;

 private:
  Protocol(int d, Kind kind, double param);
  void check_domain(int t, int h) const;

  int d_;
  Kind kind_;
  double param_ = 0.0;
  std::optional<int> horizon_;
  std::shared_ptr<const std::vector<std::vector<double>>> table_;
};

/// p(t, h) = P(h_t = h) for even t = 2, 4, ..., max_time().
template <class S>
class BasicHopDistribution {
 public:
  BasicHopDistribution(int d, std::string protocol, std::vector<std::vector<S>> rows)
      : d_(d), protocol_(std::move(protocol)), rows_(std::move(rows)) {}

  int degree() const noexcept { return d_; }
  const std::string& protocol() const noexcept { return protocol_; }
  int max_time() const noexcept { return 2 * static_cast<int>(rows_.size()); }

  /// Zero outside 1 <= h <= t/2. Throws DomainError for odd t or t < 2 and
  /// HorizonError past max_time().
  S at(int t, int h) const {
    if (t < 2 || t % 2 != 0) {
      throw DomainError("hop distribution is defined at even t >= 2, got t=" + std::to_string(t));
    }
    if (t > max_time()) {
      throw HorizonError("hop distribution covers t <= " + std::to_string(max_time()) +
                         ", asked for t=" + std::to_string(t));
    }
    if (h < 1 || h > t / 2) return S(0);
    return rows_[static_cast<std::size_t>(t / 2 - 1)][static_cast<std::size_t>(h - 1)];
  }

  /// "t,h,p" rows.
  void write_csv(std::ostream& out) const {
    out << "t,h,p\n";
    for (int t = 2; t <= max_time(); t += 2) {
      for (int h = 1; h <= t / 2; ++h) out << t << ',' << h << ',' << format(at(t, h)) << '\n';
    }
  }

 private:
  static std::string format(const Rational& r) { return to_string(r); }
  static std::string format(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }

  int d_;
  std::string protocol_;
  std::vector<std::vector<S>> rows_;
};

using HopDistribution = BasicHopDistribution<double>;
using ExactHopDistribution = BasicHopDistribution<Rational>;

/// DP p(t+2,h) = alpha(t,h) p(t,h) + (1 - alpha(t,h-1)) p(t,h-1), p(2,1) = 1.
HopDistribution hop_distribution(const Protocol& p, int T);
/// Rational DP; throws DomainError for protocols without exact alpha.
ExactHopDistribution exact_hop_distribution(const Protocol& p, int T);

/// Probability that an odd-time snapshot is a ball:
/// sum_h p(t-1, h) alpha(t-1, h). Requires odd t >= 3.
double stay_probability_at(const Protocol& p, int t_odd, const HopDistribution& hop);
Rational stay_probability_at(const Protocol& p, int t_odd, const ExactHopDistribution& hop);

}  // namespace adiff
