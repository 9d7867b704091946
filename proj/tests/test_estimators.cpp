#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "doctest.h"

#include "adiff/errors.hpp"
#include "adiff/estimators.hpp"

using namespace adiff;

namespace {

VertexLabel L(int d, std::initializer_list<int> s) { return VertexLabel::from_steps(TreeContext(d), s); }

VertexSet sorted(VertexSet v) {
  normalize(v);
  return v;
}

struct Model {
  Protocol protocol;
  HopDistribution hop;
  explicit Model(Protocol p, int T = 40) : protocol(std::move(p)), hop(hop_distribution(protocol, T)) {}
  ModelView view() const { return {&protocol, &hop}; }
};

std::vector<Snapshot> simulate_snaps(const Protocol& p, const std::vector<int>& times, std::uint64_t seed) {
  std::vector<Snapshot> out;
  for (std::size_t i = 0; i < times.size(); ++i) {
    out.push_back(snapshot_at(simulate(p, times[i], seed * 131 + i), times[i]));
  }
  return out;
}

// Tree automorphism fixing the source: children of every vertex are permuted
// by a permutation chosen from the vertex's depth and last original step.
struct Relabel {
  int d;
  std::map<std::pair<int, int>, std::vector<int>> perms;
  std::mt19937 gen;
  explicit Relabel(int degree, unsigned seed) : d(degree), gen(seed) {}

  const std::vector<int>& perm(int depth, int last) {
    auto key = std::make_pair(depth, last);
    auto it = perms.find(key);
    if (it != perms.end()) return it->second;
    std::vector<int> p(static_cast<std::size_t>(depth == 0 ? d : d - 1));
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<int>(i);
    std::shuffle(p.begin(), p.end(), gen);
    return perms.emplace(key, std::move(p)).first->second;
  }

  VertexLabel operator()(const VertexLabel& v) {
    std::vector<int> out;
    int last = -1;
    int depth = 0;
    for (auto s : v.steps()) {
      out.push_back(perm(depth, last)[s]);
      last = s;
      ++depth;
    }
    return VertexLabel::from_steps(TreeContext(d), out);
  }

  Snapshot operator()(const Snapshot& s) { return Snapshot{s.d, s.t, (*this)(s.vs_prev), (*this)(s.vs_now)}; }
};

}  // namespace

TEST_CASE("method names round trip") {
  for (auto m : {Method::single_mle, Method::two_path, Method::three_intersection, Method::k_subtree,
                 Method::generic_mle, Method::mle_cases}) {
    CHECK(parse_method(method_name(m)) == m);
  }
  CHECK_THROWS_AS(parse_method("bogus"), std::invalid_argument);
}

TEST_CASE("single MLE on the uniform protocol picks the neighbors of the virtual source") {
  const Model m(Protocol::uniform(3));
  const auto s = make_snapshot(3, 8, L(3, {1, 0}), L(3, {1, 0}));
  const auto r = single_mle_candidates(s, m.view());
  const auto set = r.candidates.materialize();
  CHECK(set == sorted(neighbors(TreeContext(3), s.vs_now)));
  CHECK(single_mle_success_probability(m.view(), 8) == doctest::Approx(2.0 / (8 * 3)));
}

TEST_CASE("single MLE success probability closed forms") {
  for (int d = 3; d <= 5; ++d) {
    const Model perfect(Protocol::perfect(d));
    for (int t = 2; t <= 20; t += 2) {
      const double n1 = d * (std::pow(d - 1.0, t / 2) - 1) / (d - 2);
      CHECK(single_mle_success_probability(perfect.view(), t) == doctest::Approx(1.0 / n1).epsilon(1e-12));
    }
    const Model local(Protocol::local_spreading(d, 0.5));
    for (int t = 6; t <= 40; t += 2) {
      const int h = t / 4;
      CHECK(single_mle_success_probability(local.view(), t) ==
            doctest::Approx(1.0 / (d * std::pow(d - 1.0, h - 1))).epsilon(1e-12));
    }
  }
}

TEST_CASE("single MLE on the perfect protocol ties every non-center vertex") {
  const Model m(Protocol::perfect(3));
  const auto s = make_snapshot(3, 6, L(3, {0, 1}), L(3, {0, 1}));
  const auto r = single_mle_candidates(s, m.view());
  CHECK(r.candidates.size() == 21);
  CHECK_FALSE(r.candidates.contains(s.vs_now));
  CHECK(r.candidates.contains(VertexLabel()));
}

TEST_CASE("two-path example with |S| = 4") {
  const auto s1 = make_snapshot(3, 8, L(3, {0, 0}), L(3, {0, 0}));
  const auto s2 = make_snapshot(3, 10, L(3, {1, 0, 0}), L(3, {1, 0, 0}));
  const auto r = two_path_candidates(s1, s2);
  CHECK(r.candidates.size() == 4);
  CHECK(r.candidates.contains(VertexLabel()));
  CHECK(r.diagnostics["fallback"] == false);
}

TEST_CASE("two-path falls back when the virtual sources coincide") {
  const auto s = make_snapshot(3, 6, L(3, {2}), L(3, {2}));
  const auto r = two_path_candidates(s, s);
  CHECK(r.diagnostics["fallback"] == true);
  CHECK(r.candidates.size() == 3);
}

TEST_CASE("two-path contains the source with a short S on different first steps") {
  const TreeContext ctx(3);
  const auto p = Protocol::uniform(3);
  int a12 = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const auto snaps = simulate_snaps(p, {10, 14}, seed);
    if (snaps[0].vs_now.steps()[0] == snaps[1].vs_now.steps()[0]) continue;
    ++a12;
    const auto r = two_path_candidates(snaps[0], snaps[1]);
    CHECK(r.candidates.contains(VertexLabel()));
    CHECK(r.candidates.size() <= 5u);
  }
  CHECK(a12 > 1000);
}

TEST_CASE("three-intersection examples") {
  const TreeContext ctx(3);
  const std::vector<VertexLabel> distinct{L(3, {0}), L(3, {1, 0}), L(3, {2, 1})};
  CHECK(three_intersection_candidates(ctx, distinct).candidates.materialize() == VertexSet{VertexLabel()});
  const std::vector<VertexLabel> along{L(3, {0, 1}), L(3, {0}), L(3, {1})};
  // Pairwise paths, written out by hand.
  const VertexSet p01{L(3, {0}), L(3, {0, 1})};
  const VertexSet p02 = sorted({L(3, {0, 1}), L(3, {0}), VertexLabel(), L(3, {1})});
  const VertexSet p12 = sorted({L(3, {0}), VertexLabel(), L(3, {1})});
  VertexSet expect;
  for (const auto& v : p01) {
    if (std::binary_search(p02.begin(), p02.end(), v) && std::binary_search(p12.begin(), p12.end(), v)) {
      expect.push_back(v);
    }
  }
  CHECK(three_intersection_candidates(ctx, along).candidates.materialize() == expect);
}

TEST_CASE("k-subtree returns the source when no subtree holds half the picks") {
  const TreeContext ctx(4);
  const std::vector<VertexLabel> spread{L(4, {0, 1}), L(4, {1}), L(4, {2, 2, 0}), L(4, {3})};
  CHECK(k_subtree_candidates(ctx, spread).candidates.materialize() == VertexSet{VertexLabel()});

  const auto p = Protocol::uniform(4);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const int k = 5 + static_cast<int>(seed % 7);
    const auto snaps = simulate_snaps(p, std::vector<int>(static_cast<std::size_t>(k), 8), seed);
    std::vector<VertexLabel> picks;
    std::vector<int> y(4, 0);
    for (const auto& s : snaps) {
      picks.push_back(s.vs_now);
      ++y[s.vs_now.steps()[0]];
    }
    const int worst = *std::max_element(y.begin(), y.end());
    if (2 * worst < k) {
      CHECK(k_subtree_candidates(ctx, picks).candidates.materialize() == VertexSet{VertexLabel()});
    }
  }
}

TEST_CASE("k-subtree with one pick is degenerate") {
  const TreeContext ctx(3);
  const std::vector<VertexLabel> one{L(3, {1, 0})};
  const auto r = k_subtree_candidates(ctx, one);
  CHECK(r.candidates.materialize() == VertexSet{L(3, {1, 0})});
}

TEST_CASE("generic MLE with one snapshot matches single MLE") {
  for (int d = 3; d <= 4; ++d) {
    for (const auto& p : {Protocol::uniform(d), Protocol::perfect(d), Protocol::local_spreading(d, 0.5)}) {
      const Model m(p, 14);
      for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const int t = 2 + static_cast<int>(seed % 12);
        const auto snaps = simulate_snaps(p, {t}, seed);
        const auto single = single_mle_candidates(snaps[0], m.view());
        const auto generic = generic_mle_candidates(snaps, m.view(), t / 2 + 1);
        CHECK(generic.candidates.materialize() == single.candidates.materialize());
        if (p.kind() == Protocol::Kind::uniform) {
          CHECK(generic_mle_candidates(snaps, m.view(), 3).candidates.materialize() ==
                single.candidates.materialize());
        }
      }
    }
  }
}

TEST_CASE("generic MLE on far apart even snapshots equals the two-path S") {
  const TreeContext ctx(3);
  const Model m(Protocol::uniform(3));
  int used = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto snaps = simulate_snaps(m.protocol, {12, 8}, seed);
    if (distance(ctx, snaps[0].vs_now, snaps[1].vs_now) < 2) continue;
    ++used;
    CHECK(generic_mle_candidates(snaps, m.view(), 3).candidates.materialize() ==
          two_path_candidates(snaps[0], snaps[1]).candidates.materialize());
  }
  CHECK(used > 100);
}

TEST_CASE("case analysis examples") {
  const Model m(Protocol::uniform(3));
  {
    const auto s = make_snapshot(3, 6, L(3, {0}), L(3, {0}));
    const auto r = uniform_mle_cases(s, s);
    CHECK(r.diagnostics["case"] == "even-even/1");
    CHECK(r.candidates.materialize() == sorted(neighbors(TreeContext(3), s.vs_now)));
  }
  {
    const auto e = make_snapshot(3, 6, L(3, {0}), L(3, {0}));
    const auto o = make_snapshot(3, 7, L(3, {0, 1}), L(3, {0, 1}));
    const auto r = uniform_mle_cases(e, o);
    CHECK(r.diagnostics["case"] == "even-odd/3");
    auto expect = neighbors(TreeContext(3), o.vs_now);
    expect.erase(std::find(expect.begin(), expect.end(), e.vs_now));
    CHECK(r.candidates.materialize() == sorted(expect));
  }
  {
    // Two moved snapshots whose central edges coincide: every vertex within
    // distance 2 of the edge, 2(d-1+(d-1)^2) = 12 of them.
    const auto s1 = make_snapshot(3, 7, L(3, {0}), L(3, {0, 1}));
    const auto s2 = make_snapshot(3, 9, L(3, {0}), L(3, {0, 1}));
    const auto cases = uniform_mle_cases(s1, s2);
    CHECK(cases.diagnostics["case"] == "odd-odd/7");
    CHECK(cases.candidates.size() == 12);
    const std::vector<Snapshot> both{s1, s2};
    CHECK(generic_mle_candidates(both, m.view(), 3).candidates.materialize() ==
          cases.candidates.materialize());
  }
  {
    // Moved snapshots whose nearest endpoints sit two apart: w and its third neighbor.
    const auto s1 = make_snapshot(3, 7, L(3, {0}), L(3, {0, 1}));
    const auto s2 = make_snapshot(3, 9, L(3, {1}), L(3, {1, 0}));
    const auto cases = uniform_mle_cases(s1, s2);
    CHECK(cases.diagnostics["case"] == "odd-odd/10");
    CHECK(cases.candidates.size() == 2);
    CHECK(cases.candidates.contains(VertexLabel()));
    CHECK(cases.candidates.contains(L(3, {2})));
  }
}

TEST_CASE("case analysis rejects small times") {
  const auto s = make_snapshot(3, 2, L(3, {0}), L(3, {0}));
  const auto big = make_snapshot(3, 6, L(3, {0}), L(3, {0}));
  CHECK_THROWS_AS(uniform_mle_cases(s, big), PreconditionError);
  const auto odd3 = make_snapshot(3, 3, L(3, {0}), L(3, {0}));
  CHECK_THROWS_AS(uniform_mle_cases(big, odd3), PreconditionError);
}

TEST_CASE("estimators are invariant under relabeling") {
  for (int d : {3, 4}) {
    const Model m(Protocol::uniform(d));
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      Relabel relabel(d, static_cast<unsigned>(seed));
      const auto snaps = simulate_snaps(m.protocol, {8, 9, 11}, seed);
      std::vector<Snapshot> moved;
      for (const auto& s : snaps) moved.push_back(relabel(s));
      for (auto method : {Method::single_mle, Method::two_path, Method::three_intersection,
                          Method::k_subtree, Method::generic_mle, Method::mle_cases}) {
        const EstimatorSpec spec{method, 3};
        const auto a = candidate_law(spec, snaps, m.view());
        const auto b = candidate_law(spec, moved, m.view());
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
          VertexSet mapped;
          for (const auto& v : a[i].candidates.materialize()) mapped.push_back(relabel(v));
          CHECK(sorted(mapped) == b[i].candidates.materialize());
        }
      }
    }
  }
}

TEST_CASE("success counts survive relabeling with coupled randomness") {
  const Model m(Protocol::uniform(3));
  for (auto method : {Method::two_path, Method::generic_mle, Method::three_intersection}) {
    int plain = 0;
    int moved_hits = 0;
    const int n = 3000;
    for (int i = 0; i < n; ++i) {
      Relabel relabel(3, static_cast<unsigned>(i));
      const auto snaps = simulate_snaps(m.protocol, {10, 10, 10}, 9000 + i);
      std::vector<Snapshot> moved;
      for (const auto& s : snaps) moved.push_back(relabel(s));
      Rng r1(i);
      Rng r2(i);
      plain += run_estimator({method, 3}, snaps, m.view(), r1).chosen.is_source();
      moved_hits += run_estimator({method, 3}, moved, m.view(), r2).chosen.is_source();
    }
    const double p = plain / double(n);
    // Coupled draws on the same candidate set sizes: the counts can only move
    // through which tie is drawn, so they stay within a few binomial sigmas.
    CHECK(std::abs(plain - moved_hits) <= 6 * std::sqrt(n * p * (1 - p)) + 1);
  }
}

TEST_CASE("run_estimator output") {
  const Model m(Protocol::uniform(3));
  const auto snaps = simulate_snaps(m.protocol, {8, 8, 8}, 4);
  Rng rng(1);
  const auto e = run_estimator({Method::generic_mle, 3}, snaps, m.view(), rng);
  CHECK(e.candidates.contains(e.chosen));
  const auto j = to_json(e);
  CHECK(j.at("method") == "generic-mle");
  CHECK(j.at("ties") == e.candidates.size());
  CHECK(j.at("chosen") == e.chosen.to_string());
  CHECK(j.contains("diagnostics"));

  Rng r2(1);
  const std::vector<Snapshot> two(snaps.begin(), snaps.begin() + 2);
  CHECK_THROWS_AS(run_estimator({Method::three_intersection, 3}, two, m.view(), r2), PreconditionError);
}

TEST_CASE("three snapshots placed in distinct subtrees give the source") {
  const Model m(Protocol::uniform(3));
  const std::vector<Snapshot> snaps{make_snapshot(3, 4, L(3, {0}), L(3, {0})),
                                    make_snapshot(3, 4, L(3, {1, 0}), L(3, {1, 0})),
                                    make_snapshot(3, 4, L(3, {2, 1}), L(3, {2, 1}))};
  for (auto method : {Method::three_intersection, Method::k_subtree, Method::generic_mle}) {
    Rng rng(3);
    CHECK(run_estimator({method, 3}, snaps, m.view(), rng).chosen.is_source());
  }
}

TEST_CASE("zero-probability hops are skipped, not fatal") {
  const Model m(Protocol::local_spreading(3, 0.5));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto snaps = simulate_snaps(m.protocol, {16, 20}, seed);
    const auto r = generic_mle_candidates(snaps, m.view(), 8);
    CHECK_FALSE(r.candidates.empty());
  }
}
