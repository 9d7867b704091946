#include "adiff/diffusion.hpp"

#include <algorithm>
#include <stdexcept>

#include "adiff/rng.hpp"

namespace adiff {

int Trajectory::hop(int t) const {
  if (t < 0 || t > length()) {
    throw std::out_of_range("trajectory has no time " + std::to_string(t));
  }
  return static_cast<int>(vs[static_cast<std::size_t>(t)].depth());
}

Trajectory simulate(const Protocol& p, int T, std::uint64_t seed) {
  if (T < 0) throw std::invalid_argument("simulation length must be non-negative");
  p.require_alpha_until(T);
  Trajectory tr;
  tr.d = p.degree();
  tr.protocol = p.name();
  tr.seed = seed;
  tr.vs.reserve(static_cast<std::size_t>(T) + 1);
  tr.vs.emplace_back();
  Rng rng(seed);
  const auto d = static_cast<std::size_t>(p.degree());
  for (int t = 0; t < T; ++t) {
    const VertexLabel& cur = tr.vs.back();
    if (t == 0) {
      tr.vs.push_back(cur.child(static_cast<VertexLabel::Step>(rng.index(d))));
    } else if (t % 2 == 1) {
      tr.vs.push_back(cur);
    } else {
      const double u = rng.uniform();
      const auto dir = static_cast<VertexLabel::Step>(rng.index(d - 1));
      const int h = static_cast<int>(cur.depth());
      if (u < p.alpha(t, h)) {
        tr.vs.push_back(cur);
      } else {
        tr.vs.push_back(cur.child(dir));
      }
    }
  }
  return tr;
}

std::vector<VertexLabel> Snapshot::virtual_sources() const {
  if (is_ball()) return {vs_now};
  return {vs_prev, vs_now};
}

Snapshot make_snapshot(int d, int t, const VertexLabel& vs_prev, const VertexLabel& vs_now) {
  TreeContext ctx(d);
  ctx.validate(vs_prev);
  ctx.validate(vs_now);
  if (t < 1) throw std::invalid_argument("snapshot time must be >= 1");
  if (t % 2 == 0 && vs_prev != vs_now) {
    throw std::invalid_argument("even-time snapshot needs vs_prev == vs_now");
  }
  if (vs_prev != vs_now && distance(ctx, vs_prev, vs_now) != 1) {
    throw std::invalid_argument("vs_prev and vs_now must coincide or be adjacent");
  }
  if (vs_now.is_source() || (t > 1 && vs_prev.is_source())) {
    throw std::invalid_argument("the virtual source cannot sit on the source after t = 0");
  }
  if (t == 1 && (!vs_prev.is_source() || vs_now.depth() != 1)) {
    throw std::invalid_argument("a t = 1 snapshot is the source plus one neighbor");
  }
  if (static_cast<int>(vs_now.depth()) > (t + 1) / 2) {
    throw std::invalid_argument("vs_now is farther from the source than time allows");
  }
  return Snapshot{d, t, vs_prev, vs_now};
}

Snapshot snapshot_at(const Trajectory& tr, int t) {
  if (t < 1 || t > tr.length()) {
    throw std::out_of_range("snapshot time " + std::to_string(t) + " outside trajectory 1.." +
                            std::to_string(tr.length()));
  }
  const auto& now = tr.vs[static_cast<std::size_t>(t)];
  const auto& prev = t % 2 == 0 ? now : tr.vs[static_cast<std::size_t>(t - 1)];
  return Snapshot{tr.d, t, prev, now};
}

int center_distance(const Snapshot& s, const VertexLabel& v) {
  const TreeContext ctx(s.d);
  const int a = distance(ctx, v, s.vs_now);
  if (s.is_ball()) return a;
  return std::min(a, distance(ctx, v, s.vs_prev));
}

bool contains(const Snapshot& s, const VertexLabel& v) { return center_distance(s, v) <= s.radius(); }

std::uint64_t infected_count(const Snapshot& s) {
  if (s.is_ball()) return ball_size(s.d, s.radius());
  // Each side of the central edge is a rooted tree of depth (t-1)/2.
  std::uint64_t side = 0;
  std::uint64_t level = 1;
  for (int r = 0; r <= s.radius(); ++r) {
    side += level;
    level *= static_cast<std::uint64_t>(s.d - 1);
  }
  return 2 * side;
}

int local_radius(const Trajectory& tr, int t) {
  if (t % 2 != 0) {
    throw DomainError("local radius is only defined here at even t, got t=" + std::to_string(t));
  }
  return t / 2 - tr.hop(t);
}

int local_radius_brute_force(const Snapshot& s) {
  const TreeContext ctx(s.d);
  const VertexLabel source;
  const auto layers = layered_neighborhood(ctx, std::span<const VertexLabel>(&source, 1),
                                           s.radius() + 1);
  int first_miss = s.radius() + 2;
  for (const auto& [v, level] : layers) {
    if (level < first_miss && !contains(s, v)) first_miss = level;
  }
  return first_miss - 1;
}

nlohmann::json to_json(const Trajectory& tr) {
  nlohmann::json vs = nlohmann::json::array();
  for (const auto& v : tr.vs) vs.push_back(v.to_string());
  return {{"d", tr.d}, {"protocol", tr.protocol}, {"seed", tr.seed}, {"vs", vs}};
}

Trajectory trajectory_from_json(const nlohmann::json& j) {
  Trajectory tr;
  tr.d = j.at("d").get<int>();
  tr.protocol = j.at("protocol").get<std::string>();
  tr.seed = j.at("seed").get<std::uint64_t>();
  const TreeContext ctx(tr.d);
  for (const auto& v : j.at("vs")) tr.vs.push_back(VertexLabel::parse(ctx, v.get<std::string>()));
  if (tr.vs.empty() || !tr.vs.front().is_source()) {
    throw std::invalid_argument("trajectory must start at the source");
  }
  return tr;
}

nlohmann::json to_json(const Snapshot& s) {
  return {{"d", s.d},
          {"t", s.t},
          {"vs_prev", s.vs_prev.to_string()},
          {"vs_now", s.vs_now.to_string()},
          {"is_ball", s.is_ball()}};
}

Snapshot snapshot_from_json(const nlohmann::json& j) {
  const int d = j.at("d").get<int>();
  const TreeContext ctx(d);
  const int t = j.at("t").get<int>();
  const auto now = VertexLabel::parse(ctx, j.at("vs_now").get<std::string>());
  const auto prev =
      j.contains("vs_prev") ? VertexLabel::parse(ctx, j.at("vs_prev").get<std::string>()) : now;
  Snapshot s = make_snapshot(d, t, prev, now);
  if (j.contains("is_ball") && j.at("is_ball").get<bool>() != s.is_ball()) {
    throw std::invalid_argument("snapshot is_ball flag disagrees with its virtual sources");
  }
  return s;
}

}  // namespace adiff
