#include <random>

#include "doctest.h"

#include "adiff/errors.hpp"
#include "adiff/tree.hpp"
#include "support.hpp"

using namespace adiff;
using testing_support::ExplicitBall;

namespace {

VertexLabel L(const TreeContext& ctx, std::initializer_list<int> s) { return VertexLabel::from_steps(ctx, s); }

}  // namespace

TEST_CASE("labels validate entry ranges") {
  const TreeContext ctx(3);
  CHECK_NOTHROW(L(ctx, {2, 1, 0}));
  CHECK_THROWS_AS(L(ctx, {3}), InvalidLabel);
  CHECK_THROWS_AS(L(ctx, {0, 2}), InvalidLabel);
  CHECK_THROWS_AS(L(ctx, {-1}), InvalidLabel);
  CHECK_THROWS_AS(TreeContext(2), std::invalid_argument);
}

TEST_CASE("text form round-trips") {
  const TreeContext ctx(4);
  CHECK(VertexLabel().to_string() == "/");
  CHECK(L(ctx, {2, 0, 1}).to_string() == "/2/0/1");
  CHECK(VertexLabel::parse(ctx, "/2/0/1") == L(ctx, {2, 0, 1}));
  CHECK(VertexLabel::parse(ctx, "/").is_source());
  CHECK_THROWS(VertexLabel::parse(ctx, "/2/3"));
  CHECK_THROWS(VertexLabel::parse(ctx, "2/0"));
}

TEST_CASE("distance examples") {
  const TreeContext ctx(3);
  CHECK(distance(ctx, L(ctx, {0}), L(ctx, {1})) == 2);
  CHECK(distance(ctx, L(ctx, {0, 1, 0}), L(ctx, {0, 1})) == 1);
  CHECK(distance(ctx, VertexLabel(), L(ctx, {2, 0})) == 2);
}

TEST_CASE("path examples") {
  const TreeContext ctx(3);
  CHECK(path_between(ctx, L(ctx, {0, 1}), L(ctx, {0})) == std::vector{L(ctx, {0, 1}), L(ctx, {0})});
  CHECK(path_between(ctx, L(ctx, {0}), L(ctx, {1})) ==
        std::vector{L(ctx, {0}), VertexLabel(), L(ctx, {1})});
  CHECK(path_between(ctx, VertexLabel(), VertexLabel()) == std::vector{VertexLabel()});
}

TEST_CASE("same_subtree examples") {
  const TreeContext ctx(3);
  CHECK(same_subtree(ctx, VertexLabel(), L(ctx, {0, 1}), L(ctx, {0})));
  CHECK_FALSE(same_subtree(ctx, VertexLabel(), L(ctx, {0}), L(ctx, {1})));
  CHECK(same_subtree(ctx, L(ctx, {0}), VertexLabel(), L(ctx, {1})));
}

TEST_CASE("steiner tree examples") {
  const TreeContext ctx(3);
  auto st = [&](std::vector<VertexLabel> t) { return steiner_tree(ctx, t); };
  CHECK(st({L(ctx, {0})}) == VertexSet{L(ctx, {0})});
  VertexSet two{L(ctx, {0}), VertexLabel(), L(ctx, {1})};
  normalize(two);
  CHECK(st({L(ctx, {0}), L(ctx, {1})}) == two);
  VertexSet three{L(ctx, {0}), VertexLabel(), L(ctx, {1}), L(ctx, {1, 0}), L(ctx, {2}), L(ctx, {2, 1})};
  normalize(three);
  const std::vector<VertexLabel> terms{L(ctx, {0}), L(ctx, {1, 0}), L(ctx, {2, 1})};
  CHECK(st(terms) == three);
  VertexSet pairwise;
  for (const auto& a : terms) {
    for (const auto& b : terms) {
      for (const auto& v : path_between(ctx, a, b)) pairwise.push_back(v);
    }
  }
  normalize(pairwise);
  CHECK(st(terms) == pairwise);
}

TEST_CASE("neighborhood examples") {
  const TreeContext ctx(3);
  const std::vector<VertexLabel> src{VertexLabel()};
  VertexSet one{VertexLabel(), L(ctx, {0}), L(ctx, {1}), L(ctx, {2})};
  normalize(one);
  CHECK(neighborhood_of_set(ctx, src, 1) == one);
  CHECK(neighborhood_of_set(ctx, src, 0) == VertexSet{VertexLabel()});
  const std::vector<VertexLabel> v{L(ctx, {0})};
  CHECK(neighborhood_of_set(ctx, v, 2).size() == 10);
}

TEST_CASE("ball size matches the closed form and enumeration") {
  for (int d = 3; d <= 5; ++d) {
    const TreeContext ctx(d);
    for (int r = 1; r <= 4; ++r) {
      const std::uint64_t expected = 1 + d * (testing_support::ipow(d - 1, r) - 1) / (d - 2);
      CHECK(ball_size(d, r) == expected);
      const std::vector<VertexLabel> c{L(ctx, {1, 0})};
      CHECK(neighborhood_of_set(ctx, c, r).size() == expected);
    }
  }
}

TEST_CASE("geometry agrees with an explicit BFS graph") {
  for (int d : {3, 4}) {
    const TreeContext ctx(d);
    const ExplicitBall ball(d, 4);
    std::vector<VertexLabel> labels;
    for (std::size_t i = 0; i < ball.names.size(); ++i) {
      labels.push_back(VertexLabel::parse(ctx, ball.slash_name(static_cast<int>(i))));
    }
    std::mt19937 gen(17u + static_cast<unsigned>(d));
    std::uniform_int_distribution<int> pick(0, static_cast<int>(labels.size()) - 1);
    for (int rep = 0; rep < 300; ++rep) {
      const int a = pick(gen);
      const int b = pick(gen);
      const auto dist = ball.bfs(a);
      CHECK(distance(ctx, labels[a], labels[b]) == dist[b]);
      const auto path = path_between(ctx, labels[a], labels[b]);
      CHECK(path.size() == static_cast<std::size_t>(dist[b] + 1));
      for (std::size_t i = 1; i < path.size(); ++i) CHECK(distance(ctx, path[i - 1], path[i]) == 1);
      if (labels[a].depth() < 4) {
        VertexSet expected;
        for (int n : ball.adj[a]) expected.push_back(labels[n]);
        normalize(expected);
        VertexSet got = neighbors(ctx, labels[a]);
        CHECK(got.size() == static_cast<std::size_t>(d));
        normalize(got);
        CHECK(got == expected);
      }
    }
  }
}

TEST_CASE("distance is a metric on random labels") {
  const TreeContext ctx(4);
  std::mt19937 gen(5);
  auto random_label = [&] {
    std::uniform_int_distribution<int> len(0, 6);
    std::vector<int> s;
    const int n = len(gen);
    for (int i = 0; i < n; ++i) s.push_back(std::uniform_int_distribution<int>(0, i == 0 ? 3 : 2)(gen));
    return VertexLabel::from_steps(ctx, s);
  };
  for (int rep = 0; rep < 500; ++rep) {
    const auto a = random_label();
    const auto b = random_label();
    const auto c = random_label();
    CHECK(distance(ctx, a, b) == distance(ctx, b, a));
    CHECK((distance(ctx, a, b) == 0) == (a == b));
    CHECK(distance(ctx, a, c) <= distance(ctx, a, b) + distance(ctx, b, c));
    if (!a.is_source() && !b.is_source()) {
      const auto path = path_between(ctx, a, b);
      const bool through_source = std::find(path.begin(), path.end(), VertexLabel()) != path.end();
      CHECK(same_subtree(ctx, VertexLabel(), a, b) == (a.steps()[0] == b.steps()[0]));
      CHECK(same_subtree(ctx, VertexLabel(), a, b) == !through_source);
    }
    if (a != b) {
      const auto hop = next_hop(ctx, a, b);
      CHECK(distance(ctx, hop, b) == distance(ctx, a, b) - 1);
      CHECK(neighbors(ctx, a)[static_cast<std::size_t>(direction_toward(ctx, a, b))] == hop);
    }
  }
}

TEST_CASE("boundary and interior") {
  const TreeContext ctx(3);
  const std::vector<VertexLabel> pair{L(ctx, {0}), L(ctx, {1})};
  const auto interior = path_interior(ctx, pair[0], pair[1]);
  CHECK(interior == std::vector{VertexLabel()});
  const std::vector<VertexLabel> edge{VertexLabel(), L(ctx, {0})};
  // Edge in a 3-regular tree has 2 + 2 outside neighbors.
  CHECK(boundary_of(ctx, edge).size() == 4);
}
