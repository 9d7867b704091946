#include "adiff/oracle.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "adiff/errors.hpp"

namespace adiff {
namespace {

template <class S>
S alpha_as(const Protocol& p, int t, int h);

template <>
double alpha_as<double>(const Protocol& p, int t, int h) {
  return p.alpha(t, h);
}

template <>
Rational alpha_as<Rational>(const Protocol& p, int t, int h) {
  auto a = p.alpha_exact(t, h);
  if (!a) throw DomainError("exact enumeration needs a protocol with exact alpha");
  return *a;
}

template <class S>
S success_share(const std::vector<Ranked>& law) {
  // Each entry is equally likely; within an entry the pick is uniform.
  const VertexLabel source;
  S total(0);
  for (const auto& r : law) {
    if (r.candidates.contains(source)) total += S(1) / S(r.candidates.size());
  }
  return total / S(law.size());
}

}  // namespace

template <class S>
std::vector<WeightedOutcome<S>> enumerate_single(const Protocol& p, int t, std::size_t cap) {
  if (t < 1) throw std::invalid_argument("enumeration needs t >= 1");
  p.require_alpha_until(t);
  const int d = p.degree();
  const TreeContext ctx(d);
  const VertexLabel source;
  if (t == 1) {
    std::vector<WeightedOutcome<S>> out;
    for (int i = 0; i < d; ++i) {
      out.push_back({source, source.child(static_cast<VertexLabel::Step>(i)), S(1) / S(d)});
    }
    return out;
  }

  // Law of vs at the last even time <= t.
  const int te = t - t % 2;
  std::map<VertexLabel, S> law;
  for (int i = 0; i < d; ++i) law.emplace(source.child(static_cast<VertexLabel::Step>(i)), S(1) / S(d));
  auto step = [&](int time, const auto& emit) {
    for (const auto& [v, mass] : law) {
      const int h = static_cast<int>(v.depth());
      const S a = alpha_as<S>(p, time, h);
      if (a != 0) emit(v, v, mass * a);
      if (a != 1) {
        const S share = mass * (S(1) - a) / S(d - 1);
        for (int c = 0; c < d - 1; ++c) emit(v, v.child(static_cast<VertexLabel::Step>(c)), share);
      }
    }
  };
  for (int time = 2; time < te; time += 2) {
    std::map<VertexLabel, S> next;
    step(time, [&](const VertexLabel&, const VertexLabel& to, const S& m) { next[to] += m; });
    if (next.size() > cap) throw BudgetExceeded("enumeration exceeds outcome cap");
    law = std::move(next);
  }

  std::vector<WeightedOutcome<S>> out;
  if (t % 2 == 0) {
    for (const auto& [v, mass] : law) out.push_back({v, v, mass});
  } else {
    step(te, [&](const VertexLabel& from, const VertexLabel& to, const S& m) {
      out.push_back({from, to, m});
    });
  }
  if (out.size() > cap) throw BudgetExceeded("enumeration exceeds outcome cap");
  return out;
}

template <class S>
S exact_success(const EstimatorSpec& spec, const Protocol& p, const std::vector<int>& times,
                std::size_t cap) {
  if (times.empty()) throw std::invalid_argument("exact_success needs at least one time");
  std::vector<std::vector<WeightedOutcome<S>>> per;
  std::size_t joint = 1;
  for (int t : times) {
    per.push_back(enumerate_single<S>(p, t, cap));
    joint *= per.back().size();
    if (joint > cap) throw BudgetExceeded("joint enumeration exceeds outcome cap");
  }
  const int t_max = *std::max_element(times.begin(), times.end());
  const int hop_horizon = std::max(2, t_max - t_max % 2);
  const HopDistribution hop = hop_distribution(p, hop_horizon);
  const ModelView model{&p, &hop};

  const int d = p.degree();
  std::vector<Snapshot> snaps(times.size());
  std::vector<std::size_t> index(times.size(), 0);
  S total(0);
  for (std::size_t n = 0; n < joint; ++n) {
    S weight(1);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const auto& o = per[i][index[i]];
      snaps[i] = Snapshot{d, times[i], o.vs_prev, o.vs_now};
      weight *= o.probability;
    }
    total += weight * success_share<S>(candidate_law(spec, snaps, model));
    for (std::size_t i = 0; i < index.size(); ++i) {
      if (++index[i] < per[i].size()) break;
      index[i] = 0;
    }
  }
  return total;
}

template std::vector<WeightedOutcome<double>> enumerate_single<double>(const Protocol&, int,
                                                                       std::size_t);
template std::vector<WeightedOutcome<Rational>> enumerate_single<Rational>(const Protocol&, int,
                                                                           std::size_t);
template double exact_success<double>(const EstimatorSpec&, const Protocol&,
                                      const std::vector<int>&, std::size_t);
template Rational exact_success<Rational>(const EstimatorSpec&, const Protocol&,
                                          const std::vector<int>&, std::size_t);

}  // namespace adiff
