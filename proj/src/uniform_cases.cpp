// Two-snapshot MLE for the uniform protocol, written out case by case.
//
// X_i(v) is the distance from v to snapshot i's virtual sources. In every
// case below the likelihood ranks vertices by a handful of integer features,
// so the optimum has a short explicit description.

#include <algorithm>
#include <stdexcept>

#include "adiff/errors.hpp"
#include "adiff/estimators.hpp"

namespace adiff {
namespace {

struct Outcome {
  std::string tag;
  VertexSet set;
};

bool both_contain(const Snapshot& a, const Snapshot& b, const VertexLabel& v) {
  return contains(a, v) && contains(b, v);
}

// Interior of the u-w path, restricted to both infected sets, ordered from u.
std::vector<VertexLabel> feasible_interior(const TreeContext& ctx, const Snapshot& a,
                                           const Snapshot& b, const VertexLabel& u,
                                           const VertexLabel& w) {
  std::vector<VertexLabel> out;
  for (auto& v : path_interior(ctx, u, w)) {
    if (both_contain(a, b, v)) out.push_back(std::move(v));
  }
  return out;
}

VertexSet minus(VertexSet set, std::initializer_list<VertexLabel> drop) {
  std::erase_if(set, [&](const VertexLabel& v) {
    return std::find(drop.begin(), drop.end(), v) != drop.end();
  });
  return set;
}

VertexSet neighbors_set(const TreeContext& ctx, const VertexLabel& v) {
  VertexSet n = neighbors(ctx, v);
  normalize(n);
  return n;
}

// Closest point of edge {e0, e1} to v, and its distance.
std::pair<VertexLabel, int> nearest_endpoint(const TreeContext& ctx, const VertexLabel& v,
                                             const VirtualSourceSet& edge) {
  const int d0 = distance(ctx, v, edge[0]);
  if (edge.size() == 1) return {edge[0], d0};
  const int d1 = distance(ctx, v, edge[1]);
  return d0 <= d1 ? std::make_pair(edge[0], d0) : std::make_pair(edge[1], d1);
}

Outcome even_even(const TreeContext& ctx, const Snapshot& s1, const Snapshot& s2) {
  const auto& a = s1.vs_now;
  const auto& b = s2.vs_now;
  const int gap = distance(ctx, a, b);
  if (gap == 0) return {"even-even/1", neighbors_set(ctx, a)};
  if (gap == 1) {
    const VertexLabel pair[] = {a, b};
    return {"even-even/2", boundary_of(ctx, pair)};
  }
  VertexSet s = feasible_interior(ctx, s1, s2, a, b);
  return {"even-even/3", s};
}

// `e` is the even snapshot, `o` the odd one.
Outcome even_odd(const TreeContext& ctx, const Snapshot& e, const Snapshot& o) {
  const auto& a = e.vs_now;
  const int x2 = center_distance(o, a);
  if (o.is_ball()) {
    const auto& b = o.vs_now;
    if (x2 == 0) return {"even-odd/1", neighbors_set(ctx, a)};
    if (x2 == 1) return {"even-odd/3", minus(neighbors_set(ctx, b), {a})};
    auto s = feasible_interior(ctx, e, o, a, b);
    if (s.empty()) throw std::logic_error("even-odd/5: empty feasible path");
    return {"even-odd/5", {s.back()}};
  }
  if (x2 <= 1) {
    return {x2 == 0 ? "even-odd/2" : "even-odd/4",
            minus(neighbors_set(ctx, a), {o.vs_prev, o.vs_now})};
  }
  const auto near = nearest_endpoint(ctx, a, o.virtual_sources()).first;
  auto s = feasible_interior(ctx, e, o, a, near);
  if (s.empty()) throw std::logic_error("even-odd/6: empty feasible path");
  return {"even-odd/6", {s.front()}};
}

Outcome odd_balls(const TreeContext& ctx, const Snapshot& s1, const Snapshot& s2) {
  const auto& a = s1.vs_now;
  const auto& b = s2.vs_now;
  const int gap = distance(ctx, a, b);
  if (gap == 0) return {"odd-odd/1", neighbors_set(ctx, a)};
  if (gap == 1) {
    if (s1.t == s2.t) {
      const VertexLabel pair[] = {a, b};
      return {"odd-odd/2", boundary_of(ctx, pair)};
    }
    if (s1.t > s2.t) return {"odd-odd/2", minus(neighbors_set(ctx, b), {a})};
    return {"odd-odd/2", minus(neighbors_set(ctx, a), {b})};
  }
  VertexSet best;
  long best_value = -1;
  for (const auto& v : feasible_interior(ctx, s1, s2, a, b)) {
    const long value = static_cast<long>(s1.t + 1 - 2 * distance(ctx, v, a)) *
                       static_cast<long>(s2.t + 1 - 2 * distance(ctx, v, b));
    if (value > best_value) {
      best_value = value;
      best.clear();
    }
    if (value == best_value) best.push_back(v);
  }
  return {"odd-odd/3", best};
}

// `b` is the ball snapshot, `n` the non-ball one.
Outcome odd_ball_edge(const TreeContext& ctx, const Snapshot& b, const Snapshot& n) {
  const auto& a = b.vs_now;
  const auto edge = n.virtual_sources();
  const auto [near, gap] = nearest_endpoint(ctx, a, edge);
  if (gap <= 1) {
    return {gap == 0 ? "odd-odd/4" : "odd-odd/5", minus(neighbors_set(ctx, a), {edge[0], edge[1]})};
  }
  auto s = feasible_interior(ctx, b, n, a, near);
  if (s.empty()) throw std::logic_error("odd-odd/6: empty feasible path");
  return {"odd-odd/6", {s.front()}};
}

Outcome odd_edges(const TreeContext& ctx, const Snapshot& s1, const Snapshot& s2) {
  const int d = ctx.degree();
  auto e1 = s1.virtual_sources();
  auto e2 = s2.virtual_sources();
  std::sort(e1.begin(), e1.end());
  std::sort(e2.begin(), e2.end());
  VertexSet h = e1;
  h.insert(h.end(), e2.begin(), e2.end());
  normalize(h);

  auto within = [&](std::span<const VertexLabel> core, int depth) {
    VertexSet out;
    for (auto& v : neighborhood_of_set(ctx, core, depth)) {
      if (!set_contains(h, v)) out.push_back(std::move(v));
    }
    return out;
  };

  if (e1 == e2) return {"odd-odd/7", within(e1, d == 3 ? 2 : 1)};
  if (h.size() == 3) {
    const auto shared = set_intersection(e1, e2);
    return {"odd-odd/8", within(shared, d == 3 ? 2 : 1)};
  }
  // Nearest pair between the two edges.
  VertexLabel v1 = e1[0];
  VertexLabel v2 = e2[0];
  int gap = distance(ctx, v1, v2);
  for (const auto& a : e1) {
    for (const auto& b : e2) {
      const int g = distance(ctx, a, b);
      if (g < gap) {
        gap = g;
        v1 = a;
        v2 = b;
      }
    }
  }
  if (gap == 1) {
    const VertexLabel pair[] = {v1, v2};
    VertexSet out;
    for (auto& v : boundary_of(ctx, pair)) {
      if (!set_contains(h, v)) out.push_back(std::move(v));
    }
    return {"odd-odd/9", out};
  }
  if (d == 3 && gap == 2) {
    const auto w = next_hop(ctx, v1, v2);
    VertexSet out{w};
    for (auto& x : neighbors(ctx, w)) {
      if (x != v1 && x != v2) out.push_back(std::move(x));
    }
    normalize(out);
    return {"odd-odd/10", out};
  }
  VertexSet best;
  int best_value = -1;
  for (const auto& v : feasible_interior(ctx, s1, s2, v1, v2)) {
    const int value = distance(ctx, v, v1) * distance(ctx, v, v2);
    if (value > best_value) {
      best_value = value;
      best.clear();
    }
    if (value == best_value) best.push_back(v);
  }
  return {"odd-odd/10", best};
}

void check_time(const Snapshot& s) {
  const int need = s.t % 2 == 0 ? 4 : 5;
  if (s.t < need) {
    throw PreconditionError("mle-cases assumes even t >= 4 and odd t >= 5, got t=" +
                            std::to_string(s.t));
  }
}

}  // namespace

Ranked uniform_mle_cases(const Snapshot& s1, const Snapshot& s2) {
  if (s1.d != s2.d) throw PreconditionError("snapshots disagree on the tree degree");
  check_time(s1);
  check_time(s2);
  const TreeContext ctx(s1.d);
  const bool even1 = s1.t % 2 == 0;
  const bool even2 = s2.t % 2 == 0;
  Outcome out;
  if (even1 && even2) {
    out = even_even(ctx, s1, s2);
  } else if (even1) {
    out = even_odd(ctx, s1, s2);
  } else if (even2) {
    out = even_odd(ctx, s2, s1);
  } else if (s1.is_ball() && s2.is_ball()) {
    out = odd_balls(ctx, s1, s2);
  } else if (s1.is_ball()) {
    out = odd_ball_edge(ctx, s1, s2);
  } else if (s2.is_ball()) {
    out = odd_ball_edge(ctx, s2, s1);
  } else {
    out = odd_edges(ctx, s1, s2);
  }
  Ranked r;
  r.diagnostics["case"] = out.tag;
  r.candidates = CandidateSet::of(std::move(out.set));
  return r;
}

}  // namespace adiff
